#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "iia/algebra/polynomial.hpp"
#include "iia/schemes/scheme.hpp"

namespace iia::schemes {

using algebra::ExactScalar;
using algebra::MonomialOrder;
using algebra::Polynomial;
using algebra::PolynomialRing;
using algebra::RingPtr;

/// Polynomial form of a scheme's constraints: solutions of
/// {f = 0 for f in equalities, g != 0 for g in inequalities}.
template <ExactScalar F>
struct AlignmentSystem {
  RingPtr<F> ring;
  std::vector<Polynomial<F>> equalities;
  std::vector<Polynomial<F>> inequalities;

  std::size_t num_variables() const { return ring->num_vars(); }
  std::size_t num_equalities() const { return equalities.size(); }
  std::size_t num_inequalities() const { return inequalities.size(); }
};

/// Names of the coding-matrix unknowns: "d<k>_<i>" for scalar entries,
/// "d<k>_<i>_<a><b>" for entry (a, b) of block i when M > 1. All 1-based.
inline std::vector<std::string> coding_variable_names(const SchemeSpec& spec,
                                                      int K) {
  std::vector<std::string> names;
  for (int k = 1; k <= spec.num_coding_matrices(); ++k) {
    for (int i = 1; i <= K; ++i) {
      if (spec.M == 1) {
        names.push_back("d" + std::to_string(k) + "_" + std::to_string(i));
        continue;
      }
      for (int a = 1; a <= spec.M; ++a) {
        for (int b = 1; b <= spec.M; ++b) {
          names.push_back("d" + std::to_string(k) + "_" + std::to_string(i) +
                          "_" + std::to_string(a) + std::to_string(b));
        }
      }
    }
  }
  return names;
}

namespace detail {

/// Coding matrices whose block entries are the ring variables, in the order
/// of coding_variable_names.
template <ExactScalar F>
std::vector<Matrix<Polynomial<F>>> symbolic_coding(const SchemeSpec& spec,
                                                   int K,
                                                   const RingPtr<F>& ring) {
  const std::size_t n = static_cast<std::size_t>(K * spec.M);
  std::vector<Matrix<Polynomial<F>>> D;
  std::size_t var = 0;
  for (int k = 0; k < spec.num_coding_matrices(); ++k) {
    Matrix<Polynomial<F>> m(n, n, Polynomial<F>(ring));
    for (int i = 0; i < K; ++i) {
      for (int a = 0; a < spec.M; ++a) {
        for (int b = 0; b < spec.M; ++b) {
          m(i * spec.M + a, i * spec.M + b) =
              Polynomial<F>::variable(ring, var++);
        }
      }
    }
    D.push_back(std::move(m));
  }
  return D;
}

template <ExactScalar F>
ChannelMatrices<Polynomial<F>> lift_constant(const ChannelInstance<F>& ch,
                                             const RingPtr<F>& ring) {
  return lift<Polynomial<F>>(
      ch, [&](const F& s) { return Polynomial<F>::constant(ring, s); });
}

}  // namespace detail

/// Effective matrix with symbolic coding matrices.
template <ExactScalar F>
Matrix<Polynomial<F>> symbolic_effective_matrix(const ChannelInstance<F>& ch,
                                                const SchemeSpec& spec,
                                                const RingPtr<F>& ring) {
  spec.check_channel(ch);
  auto D = detail::symbolic_coding(spec, ch.K, ring);
  return effective_matrix(spec, detail::lift_constant(ch, ring), D);
}

/// Interference-alignment system: every interfering entry of row r of B is
/// the same multiple of the matching entry of H, cross-multiplied against a
/// pivot column. K(K-2) equalities for M = 1 and K M ((K-1) M - 1) in
/// general; one desired-signal inequality per destination.
template <ExactScalar F>
AlignmentSystem<F> build_alignment_system(
    const ChannelInstance<F>& ch, const SchemeSpec& spec,
    const typename F::Context& ctx,
    MonomialOrder order = MonomialOrder::grevlex) {
  ch.validate();
  auto ring = PolynomialRing<F>::make(coding_variable_names(spec, ch.K), ctx,
                                      order);
  auto B = symbolic_effective_matrix(ch, spec, ring);
  auto H = detail::lift_constant(ch, ring).H;
  AlignmentSystem<F> sys{ring, {}, {}};
  sys.equalities = alignment_equations(B, H, ch.K, ch.M);
  sys.inequalities = desired_signal_forms(B, H, ch.K, ch.M);
  return sys;
}

/// Interference neutralization for the three-phase scheme: B diagonal with a
/// nonzero diagonal. K(K-1) equalities, K inequalities.
template <ExactScalar F>
AlignmentSystem<F> build_neutralization_system(
    const ChannelInstance<F>& ch, const typename F::Context& ctx,
    MonomialOrder order = MonomialOrder::grevlex) {
  ch.validate();
  if (ch.M != 1) throw Unsupported("neutralization is defined for M = 1");
  const auto spec = SchemeSpec::three_phase();
  auto ring = PolynomialRing<F>::make(coding_variable_names(spec, ch.K), ctx,
                                      order);
  auto B = symbolic_effective_matrix(ch, spec, ring);
  AlignmentSystem<F> sys{ring, {}, {}};
  for (std::size_t i = 0; i < B.rows(); ++i) {
    for (std::size_t j = 0; j < B.cols(); ++j) {
      if (i == j) {
        sys.inequalities.push_back(B(i, i));
      } else {
        sys.equalities.push_back(B(i, j));
      }
    }
  }
  return sys;
}

/// Text dump: one polynomial per line, equalities as "f = 0", inequalities
/// as "g != 0", preceded by the variable catalog.
template <ExactScalar F>
std::string to_text(const AlignmentSystem<F>& sys) {
  std::string out = "# variables:";
  for (const auto& n : sys.ring->names()) out += " " + n;
  out += "\n# field: " + sys.ring->context().name() +
         "\n# order: " + algebra::to_string(sys.ring->order()) + "\n";
  for (const auto& f : sys.equalities) out += f.to_string() + " = 0\n";
  for (const auto& g : sys.inequalities) out += g.to_string() + " != 0\n";
  return out;
}

}  // namespace iia::schemes
