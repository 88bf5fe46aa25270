#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "iia/schemes/system.hpp"

namespace iia::feasibility {

using algebra::ExactScalar;
using algebra::Polynomial;
using algebra::PolynomialRing;
using schemes::AlignmentSystem;

/// Substitute fixed values for some variables. The result lives in the ring
/// of the remaining variables (same order, same context). Any solution of
/// the result extends to a solution of `sys`, so a feasible slice certifies
/// a feasible system; an infeasible slice says nothing about `sys`.
template <ExactScalar F>
AlignmentSystem<F> slice(const AlignmentSystem<F>& sys,
                         const std::map<std::size_t, F>& fixed) {
  const auto& old_ring = *sys.ring;
  const std::size_t n = old_ring.num_vars();
  std::vector<std::string> names;
  std::vector<long> new_index(n, -1);
  for (const auto& [i, v] : fixed) {
    if (i >= n) throw InvalidArgument("slice: variable index out of range");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (fixed.count(i) == 0) {
      new_index[i] = static_cast<long>(names.size());
      names.push_back(old_ring.name(i));
    }
  }
  auto ring = PolynomialRing<F>::make(names, old_ring.context(),
                                      old_ring.order());
  auto restrict = [&](const Polynomial<F>& p) {
    std::vector<algebra::Term<F>> terms;
    terms.reserve(p.num_terms());
    for (const auto& t : p.terms()) {
      F c = t.coeff;
      std::vector<unsigned> e(names.size(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        const unsigned k = t.monomial[i];
        if (k == 0) continue;
        if (new_index[i] >= 0) {
          e[static_cast<std::size_t>(new_index[i])] = k;
        } else {
          const F& v = fixed.at(i);
          for (unsigned r = 0; r < k; ++r) c *= v;
        }
      }
      terms.push_back({algebra::Monomial(e), std::move(c)});
    }
    return Polynomial<F>::from_terms(ring, std::move(terms));
  };
  AlignmentSystem<F> out{ring, {}, {}};
  for (const auto& f : sys.equalities) out.equalities.push_back(restrict(f));
  for (const auto& g : sys.inequalities) {
    out.inequalities.push_back(restrict(g));
  }
  return out;
}

}  // namespace iia::feasibility
