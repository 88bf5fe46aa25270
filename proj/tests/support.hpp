#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "iia/algebra.hpp"

namespace iia::testing {

using algebra::GaussianRational;
using algebra::Monomial;
using algebra::Polynomial;
using algebra::PolynomialRing;
using algebra::PrimeFieldContext;
using algebra::PrimeFieldElement;
using algebra::RingPtr;
using algebra::Term;

inline PrimeFieldElement random_scalar(const PrimeFieldContext& ctx,
                                       std::mt19937_64& rng, int range) {
  std::uniform_int_distribution<int> d(-range, range);
  return ctx.from_int(d(rng));
}

inline GaussianRational random_scalar(const GaussianRational::Context&,
                                      std::mt19937_64& rng, int range) {
  std::uniform_int_distribution<int> n(-range, range);
  std::uniform_int_distribution<int> den(1, 4);
  const int a = n(rng), b = den(rng), c = n(rng) / 2;
  return GaussianRational(mpq_class(a, b), mpq_class(c, 1));
}

/// Dense-ish random polynomial with `terms` terms of degree <= max_deg.
template <class F>
Polynomial<F> random_poly(const RingPtr<F>& ring, std::mt19937_64& rng,
                          std::size_t terms, unsigned max_deg, int range = 5) {
  std::uniform_int_distribution<unsigned> e(0, max_deg);
  std::vector<Term<F>> out;
  for (std::size_t k = 0; k < terms; ++k) {
    std::vector<unsigned> exps(ring->num_vars());
    unsigned total = 0;
    for (auto& x : exps) {
      x = total >= max_deg ? 0 : std::min(e(rng), max_deg - total);
      total += x;
    }
    out.push_back({Monomial(exps), random_scalar(ring->context(), rng, range)});
  }
  return Polynomial<F>::from_terms(ring, std::move(out));
}

template <class F>
Polynomial<F> random_nonzero_poly(const RingPtr<F>& ring, std::mt19937_64& rng,
                                  std::size_t terms, unsigned max_deg) {
  for (;;) {
    auto p = random_poly(ring, rng, terms, max_deg);
    if (!p.is_zero()) return p;
  }
}

inline std::vector<std::string> var_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i + 1));
  return out;
}

}  // namespace iia::testing
