#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "iia/algebra/polynomial.hpp"

namespace iia::algebra {

template <ExactScalar F>
struct DivisionResult {
  std::vector<Polynomial<F>> quotients;
  Polynomial<F> remainder;
};

namespace detail {

template <ExactScalar F>
void require_same_ring(const Polynomial<F>& a, const Polynomial<F>& b) {
  if (!a.ring() || !b.ring() || !a.ring()->same_as(*b.ring())) {
    throw ContextMismatch("polynomials from different rings");
  }
}

/// Geometric bucket accumulator (Yap). Each bucket holds a term list in
/// ascending order so the leading term sits at the back.
template <ExactScalar F>
class Geobucket {
 public:
  explicit Geobucket(MonomialOrder order) : order_(order) {}

  /// Adds `terms` (ascending order).
  void add(std::vector<Term<F>> terms) {
    std::size_t k = bucket_for(terms.size());
    for (;;) {
      if (k >= buckets_.size()) buckets_.resize(k + 1);
      terms = merge(std::move(buckets_[k]), std::move(terms));
      buckets_[k].clear();
      if (terms.size() <= capacity(k)) {
        buckets_[k] = std::move(terms);
        return;
      }
      ++k;
    }
  }

  /// Removes and returns the leading term of the accumulated sum.
  std::optional<Term<F>> pop_leading() {
    for (;;) {
      int best = -1;
      for (std::size_t k = 0; k < buckets_.size(); ++k) {
        if (buckets_[k].empty()) continue;
        if (best < 0 ||
            Monomial::compare(buckets_[k].back().monomial,
                              buckets_[best].back().monomial, order_) > 0) {
          best = static_cast<int>(k);
        }
      }
      if (best < 0) return std::nullopt;
      Term<F> lead = std::move(buckets_[best].back());
      buckets_[best].pop_back();
      for (std::size_t k = 0; k < buckets_.size(); ++k) {
        if (static_cast<int>(k) == best || buckets_[k].empty()) continue;
        if (buckets_[k].back().monomial == lead.monomial) {
          lead.coeff += buckets_[k].back().coeff;
          buckets_[k].pop_back();
        }
      }
      if (!lead.coeff.is_zero()) return lead;
    }
  }

 private:
  static constexpr std::size_t kBase = 8;

  static std::size_t capacity(std::size_t k) {
    std::size_t c = kBase;
    for (std::size_t i = 0; i < k; ++i) c *= 4;
    return c;
  }
  static std::size_t bucket_for(std::size_t len) {
    std::size_t k = 0;
    while (capacity(k) < len) ++k;
    return k;
  }

  std::vector<Term<F>> merge(std::vector<Term<F>> a, std::vector<Term<F>> b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<Term<F>> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      int cmp = Monomial::compare(a[i].monomial, b[j].monomial, order_);
      if (cmp < 0) {
        out.push_back(std::move(a[i++]));
      } else if (cmp > 0) {
        out.push_back(std::move(b[j++]));
      } else {
        a[i].coeff += b[j].coeff;
        if (!a[i].coeff.is_zero()) out.push_back(std::move(a[i]));
        ++i;
        ++j;
      }
    }
    for (; i < a.size(); ++i) out.push_back(std::move(a[i]));
    for (; j < b.size(); ++j) out.push_back(std::move(b[j]));
    return out;
  }

  MonomialOrder order_;
  std::vector<std::vector<Term<F>>> buckets_;
};

/// Terms of c*m*(p minus its leading term), ascending.
template <ExactScalar F>
std::vector<Term<F>> shifted_tail(const Polynomial<F>& p, const F& c,
                                  const Monomial& m) {
  const auto& terms = p.terms();
  std::vector<Term<F>> out;
  out.reserve(terms.size() - 1);
  for (std::size_t k = terms.size(); k-- > 1;) {
    out.push_back({terms[k].monomial * m, terms[k].coeff * c});
  }
  return out;
}

template <ExactScalar F>
std::vector<Term<F>> ascending_terms(const Polynomial<F>& p) {
  return {p.terms().rbegin(), p.terms().rend()};
}

}  // namespace detail

/// Multivariate division of f by the ordered list `divisors` under the
/// order of f's ring: f = sum q_i g_i + r with no term of r divisible by any
/// LT(g_i).
template <ExactScalar F>
DivisionResult<F> divide(const Polynomial<F>& f,
                         const std::vector<Polynomial<F>>& divisors) {
  const auto& ring = f.ring();
  for (const auto& g : divisors) {
    detail::require_same_ring(f, g);
    if (g.is_zero()) throw InvalidArgument("division by the zero polynomial");
  }
  DivisionResult<F> result;
  std::vector<std::vector<Term<F>>> quotient_terms(divisors.size());
  std::vector<Term<F>> remainder_terms;
  detail::Geobucket<F> p(ring->order());
  p.add(detail::ascending_terms(f));
  while (auto lead = p.pop_leading()) {
    bool divided = false;
    for (std::size_t i = 0; i < divisors.size(); ++i) {
      const auto& g = divisors[i];
      if (!g.leading_monomial().divides(lead->monomial)) continue;
      F c = lead->coeff / g.leading_coeff();
      Monomial m = lead->monomial.quotient(g.leading_monomial());
      p.add(detail::shifted_tail(g, -c, m));
      quotient_terms[i].push_back({std::move(m), std::move(c)});
      divided = true;
      break;
    }
    if (!divided) remainder_terms.push_back(std::move(*lead));
  }
  for (auto& q : quotient_terms) {
    result.quotients.push_back(
        Polynomial<F>::from_sorted_terms(ring, std::move(q)));
  }
  result.remainder =
      Polynomial<F>::from_sorted_terms(ring, std::move(remainder_terms));
  return result;
}

/// divide() after re-expressing everything under `order`.
template <ExactScalar F>
DivisionResult<F> divide(const Polynomial<F>& f,
                         const std::vector<Polynomial<F>>& divisors,
                         MonomialOrder order) {
  auto ring = f.ring()->with_order(order);
  std::vector<Polynomial<F>> ds;
  ds.reserve(divisors.size());
  for (const auto& g : divisors) ds.push_back(g.in_ring(ring));
  return divide(f.in_ring(ring), ds);
}

/// Remainder of f on division by `divisors` (no quotients tracked).
template <ExactScalar F>
Polynomial<F> normal_form(const Polynomial<F>& f,
                          const std::vector<const Polynomial<F>*>& divisors) {
  const auto& ring = f.ring();
  std::vector<Term<F>> remainder_terms;
  detail::Geobucket<F> p(ring->order());
  p.add(detail::ascending_terms(f));
  while (auto lead = p.pop_leading()) {
    const Polynomial<F>* hit = nullptr;
    for (const Polynomial<F>* g : divisors) {
      if (g->leading_monomial().divides(lead->monomial)) {
        hit = g;
        break;
      }
    }
    if (hit == nullptr) {
      remainder_terms.push_back(std::move(*lead));
      continue;
    }
    F c = hit->leading_coeff().is_one() ? lead->coeff
                                        : lead->coeff / hit->leading_coeff();
    p.add(detail::shifted_tail(
        *hit, -c, lead->monomial.quotient(hit->leading_monomial())));
  }
  return Polynomial<F>::from_sorted_terms(ring, std::move(remainder_terms));
}

template <ExactScalar F>
Polynomial<F> normal_form(const Polynomial<F>& f,
                          const std::vector<Polynomial<F>>& divisors) {
  std::vector<const Polynomial<F>*> ptrs;
  ptrs.reserve(divisors.size());
  for (const auto& g : divisors) {
    detail::require_same_ring(f, g);
    if (g.is_zero()) throw InvalidArgument("division by the zero polynomial");
    ptrs.push_back(&g);
  }
  return normal_form(f, ptrs);
}

/// S(p, q) = (x^gamma / LT(p)) p - (x^gamma / LT(q)) q, gamma = lcm of the
/// leading monomials. Leading terms cancel.
template <ExactScalar F>
Polynomial<F> s_polynomial(const Polynomial<F>& p, const Polynomial<F>& q) {
  detail::require_same_ring(p, q);
  if (p.is_zero() || q.is_zero()) {
    throw InvalidArgument("S-polynomial of the zero polynomial");
  }
  Monomial gamma = Monomial::lcm(p.leading_monomial(), q.leading_monomial());
  auto left = p.mul_term(p.leading_coeff().inverse(),
                         gamma.quotient(p.leading_monomial()));
  return left.sub_mul_term(q.leading_coeff().inverse(),
                           gamma.quotient(q.leading_monomial()), q);
}

template <ExactScalar F>
Polynomial<F> s_polynomial(const Polynomial<F>& p, const Polynomial<F>& q,
                           MonomialOrder order) {
  auto ring = p.ring()->with_order(order);
  return s_polynomial(p.in_ring(ring), q.in_ring(ring));
}

}  // namespace iia::algebra
