#pragma once

#include <string>
#include <vector>

#include "iia/algebra/groebner.hpp"
#include "iia/schemes/system.hpp"

namespace iia::feasibility {

using algebra::BuchbergerOptions;
using algebra::BuchbergerStats;
using algebra::BuchbergerStatus;
using algebra::ExactScalar;
using algebra::Polynomial;
using algebra::PolynomialRing;
using schemes::AlignmentSystem;

enum class Outcome { feasible, infeasible, budget_exhausted };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::feasible:
      return "feasible";
    case Outcome::infeasible:
      return "infeasible";
    case Outcome::budget_exhausted:
      return "budget-exhausted";
  }
  return "?";
}

struct Verdict {
  Outcome outcome = Outcome::budget_exhausted;
  std::string backend;
  BuchbergerStats stats;
};

/// Replace the inequalities g_1..g_m by the single equality t g_1...g_m - 1
/// in a ring with one more variable t (appended last).
template <ExactScalar F>
AlignmentSystem<F> rabinowitsch(const AlignmentSystem<F>& sys,
                                const std::string& name = "t") {
  auto names = sys.ring->names();
  for (const auto& n : names) {
    if (n == name) throw InvalidArgument("variable '" + name + "' in use");
  }
  names.push_back(name);
  auto ring = PolynomialRing<F>::make(names, sys.ring->context(),
                                      sys.ring->order());
  const std::size_t n = sys.ring->num_vars();
  auto widen = [&](const Polynomial<F>& p) {
    std::vector<algebra::Term<F>> terms;
    for (const auto& t : p.terms()) {
      std::vector<unsigned> e(n + 1, 0);
      for (std::size_t i = 0; i < n; ++i) e[i] = t.monomial[i];
      terms.push_back({algebra::Monomial(e), t.coeff});
    }
    return Polynomial<F>::from_terms(ring, std::move(terms));
  };
  AlignmentSystem<F> out{ring, {}, {}};
  for (const auto& f : sys.equalities) out.equalities.push_back(widen(f));
  auto g = Polynomial<F>::variable(ring, n);
  for (const auto& q : sys.inequalities) g = g * widen(q);
  out.equalities.push_back(g - Polynomial<F>::constant(ring, 1));
  return out;
}

/// Same elimination with one fresh variable per inequality: t_j g_j - 1
/// for each j, variables t1..tm appended last. Equivalent to the product
/// form (all g_j are nonzero iff each has an inverse) and avoids expanding
/// the product.
template <ExactScalar F>
AlignmentSystem<F> rabinowitsch_separate(const AlignmentSystem<F>& sys) {
  auto names = sys.ring->names();
  const std::size_t n = names.size();
  const std::size_t m = sys.inequalities.size();
  for (std::size_t j = 0; j < m; ++j) {
    std::string name = "t" + std::to_string(j + 1);
    for (const auto& existing : names) {
      if (existing == name) {
        throw InvalidArgument("variable '" + name + "' in use");
      }
    }
    names.push_back(std::move(name));
  }
  auto ring = PolynomialRing<F>::make(names, sys.ring->context(),
                                      sys.ring->order());
  auto widen = [&](const Polynomial<F>& p) {
    std::vector<algebra::Term<F>> terms;
    for (const auto& t : p.terms()) {
      std::vector<unsigned> e(n + m, 0);
      for (std::size_t i = 0; i < n; ++i) e[i] = t.monomial[i];
      terms.push_back({algebra::Monomial(e), t.coeff});
    }
    return Polynomial<F>::from_terms(ring, std::move(terms));
  };
  AlignmentSystem<F> out{ring, {}, {}};
  for (const auto& f : sys.equalities) out.equalities.push_back(widen(f));
  for (std::size_t j = 0; j < m; ++j) {
    out.equalities.push_back(Polynomial<F>::variable(ring, n + j) *
                                 widen(sys.inequalities[j]) -
                             Polynomial<F>::constant(ring, 1));
  }
  return out;
}

/// Weak Nullstellensatz test on an inequality-free system: infeasible iff
/// the Groebner basis contains a nonzero constant. Runs that exhaust the
/// budget make no claim.
template <ExactScalar F>
Verdict decide(const AlignmentSystem<F>& sys,
               const BuchbergerOptions& options = {}) {
  if (!sys.inequalities.empty()) {
    throw InvalidArgument("decide: eliminate inequalities with rabinowitsch");
  }
  Verdict v;
  v.backend = sys.ring->context().name();
  std::vector<Polynomial<F>> gens;
  for (const auto& f : sys.equalities) {
    if (!f.is_zero()) gens.push_back(f);
  }
  if (gens.empty()) {
    v.outcome = Outcome::feasible;
    return v;
  }
  auto opts = options;
  opts.stop_on_unit = true;
  auto gb = algebra::buchberger(gens, opts);
  v.stats = gb.stats();
  switch (gb.status()) {
    case BuchbergerStatus::unit_found:
      v.outcome = Outcome::infeasible;
      break;
    case BuchbergerStatus::complete:
      v.outcome = algebra::contains_unit(gb) ? Outcome::infeasible
                                             : Outcome::feasible;
      break;
    case BuchbergerStatus::budget_exhausted:
      v.outcome = Outcome::budget_exhausted;
      break;
  }
  return v;
}

}  // namespace iia::feasibility
