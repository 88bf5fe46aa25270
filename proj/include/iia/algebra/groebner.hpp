#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <new>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iia/algebra/division.hpp"
#include "iia/algebra/polynomial.hpp"

namespace iia::algebra {

/// Caps for one Buchberger run. Hitting any of them ends the run with
/// BuchbergerStatus::budget_exhausted, which makes no claim about the ideal.
struct BuchbergerBudget {
  std::size_t max_basis_size = 200000;
  std::size_t max_reductions = 1000000;
  /// Total terms stored across the working basis; a memory cap.
  std::size_t max_terms = 30000000;
  std::chrono::milliseconds max_wall{std::chrono::minutes(10)};
};

struct BuchbergerOptions {
  BuchbergerBudget budget;
  /// Return the reduced Groebner basis instead of the raw loop output.
  bool reduce = true;
  /// Abort as soon as a nonzero constant enters the basis.
  bool stop_on_unit = true;
};

enum class BuchbergerStatus { complete, unit_found, budget_exhausted };

inline std::string to_string(BuchbergerStatus s) {
  switch (s) {
    case BuchbergerStatus::complete:
      return "complete";
    case BuchbergerStatus::unit_found:
      return "unit_found";
    case BuchbergerStatus::budget_exhausted:
      return "budget_exhausted";
  }
  return "?";
}

struct BuchbergerStats {
  std::size_t pairs_created = 0;
  std::size_t reductions = 0;
  std::size_t zero_reductions = 0;
  std::size_t basis_size = 0;
  std::size_t stored_terms = 0;
  unsigned max_degree = 0;
  double seconds = 0.0;
};

template <ExactScalar F>
class GroebnerBasis {
 public:
  GroebnerBasis(std::vector<Polynomial<F>> polys, MonomialOrder order,
                std::vector<Polynomial<F>> generators, BuchbergerStatus status,
                BuchbergerStats stats)
      : polys_(std::move(polys)),
        order_(order),
        generators_(std::move(generators)),
        status_(status),
        stats_(stats) {}

  const std::vector<Polynomial<F>>& polynomials() const { return polys_; }
  MonomialOrder order() const { return order_; }
  /// The nonzero input generators, as given.
  const std::vector<Polynomial<F>>& generators() const { return generators_; }
  BuchbergerStatus status() const { return status_; }
  const BuchbergerStats& stats() const { return stats_; }
  /// A basis cut short by the budget is only a partial computation.
  bool is_complete() const {
    return status_ != BuchbergerStatus::budget_exhausted;
  }
  std::size_t size() const { return polys_.size(); }

 private:
  std::vector<Polynomial<F>> polys_;
  MonomialOrder order_;
  std::vector<Polynomial<F>> generators_;
  BuchbergerStatus status_;
  BuchbergerStats stats_;
};

namespace detail {

struct CriticalPair {
  std::size_t i;
  std::size_t j;
  Monomial lcm;
};

/// Interreduce a minimal basis into the reduced Groebner basis.
template <ExactScalar F>
std::vector<Polynomial<F>> interreduce(std::vector<Polynomial<F>> basis) {
  std::vector<Polynomial<F>> out;
  out.reserve(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    std::vector<const Polynomial<F>*> others;
    for (std::size_t l = 0; l < basis.size(); ++l) {
      if (l != k) others.push_back(&basis[l]);
    }
    const auto& g = basis[k];
    auto lead = Polynomial<F>::monomial(g.ring(), g.leading_coeff(),
                                        g.leading_monomial());
    auto tail = g - lead;
    out.push_back((lead + normal_form(tail, others)).make_monic());
  }
  const auto order = out.empty() ? MonomialOrder::grevlex
                                 : out.front().ring()->order();
  std::sort(out.begin(), out.end(), [order](const auto& a, const auto& b) {
    return Monomial::compare(a.leading_monomial(), b.leading_monomial(),
                             order) < 0;
  });
  return out;
}

}  // namespace detail

/// Buchberger's completion loop. Pairs are taken smallest-lcm-first in the
/// ring order (normal selection) and pruned with the Gebauer-Moeller
/// criteria, which include the coprime-leading-monomial criterion. Zero generators are dropped; an
/// all-zero generator list is rejected.
template <ExactScalar F>
GroebnerBasis<F> buchberger(const std::vector<Polynomial<F>>& generators,
                            const BuchbergerOptions& options = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  std::vector<Polynomial<F>> inputs;
  for (const auto& g : generators) {
    if (!g.is_zero()) inputs.push_back(g);
  }
  if (inputs.empty()) throw InvalidArgument("buchberger: all generators zero");
  for (const auto& g : inputs) detail::require_same_ring(inputs.front(), g);
  const auto ring = inputs.front().ring();
  const auto order = ring->order();

  BuchbergerStats stats;
  std::vector<Polynomial<F>> store;  // every polynomial ever added
  std::vector<bool> active;          // current minimal basis members

  auto pair_less = [order](const detail::CriticalPair& a,
                           const detail::CriticalPair& b) {
    int c = Monomial::compare(a.lcm, b.lcm, order);
    if (c != 0) return c < 0;
    if (a.j != b.j) return a.j < b.j;
    return a.i < b.i;
  };
  std::set<detail::CriticalPair, decltype(pair_less)> pairs(pair_less);

  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  auto finish = [&](BuchbergerStatus status) {
    std::vector<Polynomial<F>> out;
    if (status == BuchbergerStatus::unit_found) {
      out.push_back(Polynomial<F>::constant(ring, ring->context().one()));
    } else if (options.reduce && status == BuchbergerStatus::complete) {
      // Inputs enter unreduced, so an active leading monomial can still be
      // a multiple of another one.
      std::vector<Polynomial<F>> minimal;
      for (std::size_t k = 0; k < store.size(); ++k) {
        if (!active[k]) continue;
        const Monomial& lk = store[k].leading_monomial();
        bool redundant = false;
        for (std::size_t l = 0; l < store.size() && !redundant; ++l) {
          if (l == k || !active[l]) continue;
          const Monomial& ll = store[l].leading_monomial();
          redundant = ll.divides(lk) && (ll != lk || l < k);
        }
        if (!redundant) minimal.push_back(store[k]);
      }
      out = detail::interreduce(std::move(minimal));
    } else {
      out = std::move(store);
    }
    stats.basis_size = out.size();
    stats.seconds = elapsed();
    return GroebnerBasis<F>(std::move(out), order, inputs, status, stats);
  };

  // Gebauer-Moeller update with the new element store[h].
  auto update = [&](std::size_t h) {
    const Monomial& lh = store[h].leading_monomial();
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < h; ++k) {
      if (active[k]) candidates.push_back(k);
    }
    std::vector<Monomial> lcms;
    lcms.reserve(candidates.size());
    for (std::size_t k : candidates) {
      lcms.push_back(Monomial::lcm(lh, store[k].leading_monomial()));
    }
    // Chain criterion among the new pairs; coprime pairs are kept here and
    // dropped below so that they still shadow other pairs.
    std::vector<bool> keep(candidates.size(), true);
    for (std::size_t a = 0; a < candidates.size(); ++a) {
      if (lh.coprime_with(store[candidates[a]].leading_monomial())) continue;
      for (std::size_t b = 0; b < candidates.size(); ++b) {
        if (a == b || !keep[b]) continue;
        if (lcms[b].divides(lcms[a]) &&
            (lcms[b] != lcms[a] || b < a)) {
          keep[a] = false;
          break;
        }
      }
    }
    // Old pairs made redundant by h.
    for (auto it = pairs.begin(); it != pairs.end();) {
      const auto& p = *it;
      if (lh.divides(p.lcm) &&
          Monomial::lcm(store[p.i].leading_monomial(), lh) != p.lcm &&
          Monomial::lcm(store[p.j].leading_monomial(), lh) != p.lcm) {
        it = pairs.erase(it);
      } else {
        ++it;
      }
    }
    for (std::size_t a = 0; a < candidates.size(); ++a) {
      if (!keep[a]) continue;
      if (lh.coprime_with(store[candidates[a]].leading_monomial())) continue;
      pairs.insert({candidates[a], h, lcms[a]});
      ++stats.pairs_created;
    }
    for (std::size_t k : candidates) {
      if (lh.divides(store[k].leading_monomial())) active[k] = false;
    }
    active.push_back(true);
  };

  auto add = [&](Polynomial<F> p) {
    stats.max_degree = std::max(stats.max_degree, p.total_degree());
    stats.stored_terms += p.num_terms();
    store.push_back(std::move(p));
    update(store.size() - 1);
  };

  for (const auto& g : inputs) {
    if (g.is_constant()) {
      store.push_back(g);
      active.push_back(true);
      return finish(BuchbergerStatus::unit_found);
    }
    add(g);
  }

  while (!pairs.empty()) {
    if (stats.reductions >= options.budget.max_reductions ||
        store.size() >= options.budget.max_basis_size ||
        stats.stored_terms >= options.budget.max_terms ||
        Clock::now() - start > options.budget.max_wall) {
      return finish(BuchbergerStatus::budget_exhausted);
    }
    detail::CriticalPair pair = *pairs.begin();
    pairs.erase(pairs.begin());

    std::vector<const Polynomial<F>*> reducers;
    for (std::size_t k = 0; k < store.size(); ++k) {
      if (active[k]) reducers.push_back(&store[k]);
    }
    Polynomial<F> remainder;
    try {
      remainder = normal_form(s_polynomial(store[pair.i], store[pair.j]),
                              reducers);
    } catch (const std::bad_alloc&) {
      return finish(BuchbergerStatus::budget_exhausted);
    }
    ++stats.reductions;
    if (remainder.is_zero()) {
      ++stats.zero_reductions;
      continue;
    }
    remainder = remainder.make_monic();
    if (remainder.is_constant() && options.stop_on_unit) {
      store.push_back(std::move(remainder));
      active.push_back(true);
      return finish(BuchbergerStatus::unit_found);
    }
    add(std::move(remainder));
  }
  bool unit = false;
  for (std::size_t k = 0; k < store.size(); ++k) {
    if (active[k] && store[k].is_constant()) unit = true;
  }
  return finish(unit ? BuchbergerStatus::unit_found
                     : BuchbergerStatus::complete);
}

/// buchberger() after re-expressing the generators under `order`.
template <ExactScalar F>
GroebnerBasis<F> buchberger(const std::vector<Polynomial<F>>& generators,
                            MonomialOrder order,
                            const BuchbergerOptions& options = {}) {
  std::vector<Polynomial<F>> gens;
  for (const auto& g : generators) {
    gens.push_back(g.in_ring(g.ring()->with_order(order)));
  }
  return buchberger(gens, options);
}

/// Some basis element is a nonzero constant, i.e. the ideal is the whole ring.
template <ExactScalar F>
bool contains_unit(const GroebnerBasis<F>& basis) {
  for (const auto& g : basis.polynomials()) {
    if (g.is_constant()) return true;
  }
  return false;
}

/// f lies in the ideal iff its remainder on division by the basis is zero.
template <ExactScalar F>
bool ideal_membership(const Polynomial<F>& f, const GroebnerBasis<F>& basis) {
  if (!basis.is_complete()) {
    throw InvalidArgument("ideal_membership needs a complete Groebner basis");
  }
  if (basis.polynomials().empty()) return f.is_zero();
  auto ring = basis.polynomials().front().ring();
  return normal_form(f.in_ring(ring), basis.polynomials()).is_zero();
}

/// Every S-polynomial of the list reduces to zero on division by the list.
template <ExactScalar F>
bool is_groebner_basis(const std::vector<Polynomial<F>>& polys) {
  for (std::size_t i = 0; i < polys.size(); ++i) {
    for (std::size_t j = i + 1; j < polys.size(); ++j) {
      if (!divide(s_polynomial(polys[i], polys[j]), polys)
               .remainder.is_zero()) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace iia::algebra
