#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "iia/algebra/linear_solve.hpp"
#include "iia/algebra/matrix.hpp"
#include "iia/algebra/polynomial.hpp"
#include "iia/channels.hpp"
#include "iia/schemes/scheme.hpp"
#include "iia/schemes/solution.hpp"
#include "iia/schemes/system.hpp"

namespace iia::schemes {

using algebra::GaussianRational;
using channels::ExactChannel;
using channels::RankOnePlusDiagonal;

// ---------------------------------------------------------------------------
// Rank-one-plus-diagonal channels: closed form

struct ClosedForm {
  GaussianRational alpha;
  std::vector<Matrix<GaussianRational>> coding;  // D_1, D_2, D_3
};

/// For H = D + u v^T and G = H^T: D_1 = D^-1 diag(u)^-1 diag(v),
/// D_3 = D^-1 diag(v)^-1 diag(u), D_2 = -alpha I with
/// alpha = 3 + 3 s + s^2, s = v^T D^-1 u. The effective matrix is then
/// (1 - alpha) D, which neutralizes all interference unless alpha = 1.
inline ClosedForm solve_rank1_closed_form(const RankOnePlusDiagonal& f) {
  channels::check_hypotheses(f);
  const std::size_t K = f.d.size();
  GaussianRational s = 0;
  for (std::size_t i = 0; i < K; ++i) s += f.v[i] * f.u[i] / f.d[i];
  ClosedForm out;
  out.alpha = GaussianRational(3) + GaussianRational(3) * s + s * s;
  if (out.alpha.is_one()) {
    throw DegenerateChannel("alpha = 1: the closed form collapses to B = 0");
  }
  std::vector<GaussianRational> d1, d3;
  for (std::size_t i = 0; i < K; ++i) {
    d1.push_back(f.v[i] / (f.d[i] * f.u[i]));
    d3.push_back(f.u[i] / (f.d[i] * f.v[i]));
  }
  out.coding.push_back(Matrix<GaussianRational>::diagonal(d1, 0));
  out.coding.push_back(Matrix<GaussianRational>::diagonal(
      std::vector<GaussianRational>(K, -out.alpha), 0));
  out.coding.push_back(Matrix<GaussianRational>::diagonal(d3, 0));
  return out;
}

// ---------------------------------------------------------------------------
// Linear constructions

/// Rank data of a homogeneous linear alignment system and of the subspaces
/// where a desired-signal inequality fails.
struct LinearDiagnostics {
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  std::size_t rank = 0;
  std::size_t nullspace_dim = 0;
  /// Dimension of {x in nullspace : inequality i fails}, per destination.
  /// Empty when the inequalities are not linear (M > 1).
  std::vector<std::size_t> bad_subspace_dims;
  /// Each inequality is nonzero somewhere on the nullspace, so a generic
  /// nullspace point satisfies all of them.
  bool admits_solution = false;
  /// The nullspace is spanned by the trivial direction B proportional to H.
  bool only_trivial = false;
  std::size_t attempts = 0;
};

template <ExactScalar F>
struct LinearSolveResult {
  AlignmentSolution<F> solution;
  LinearDiagnostics diagnostics;
};

/// Coefficients of a homogeneous linear polynomial.
template <ExactScalar F>
std::vector<F> linear_coefficients(const Polynomial<F>& p) {
  const auto& ring = *p.ring();
  std::vector<F> row(ring.num_vars(), ring.context().zero());
  for (const auto& t : p.terms()) {
    if (t.monomial.degree() != 1) {
      throw InvalidArgument("polynomial is not homogeneous linear");
    }
    for (std::size_t i = 0; i < ring.num_vars(); ++i) {
      if (t.monomial[i] == 1) row[i] = t.coeff;
    }
  }
  return row;
}

namespace detail {

/// Which coding matrices are fixed numerically; the rest are unknown.
template <ExactScalar F>
using Pins = std::vector<std::optional<Matrix<F>>>;

/// The alignment system as a linear map in the free coding entries.
template <ExactScalar F>
struct LinearSystem {
  RingPtr<F> ring;
  Matrix<F> A;                          // equations x unknowns
  std::vector<Polynomial<F>> desired;   // desired-signal forms, M = 1 only
  Matrix<Polynomial<F>> B;
  Matrix<F> H;
  int K = 0;
  int M = 1;
  std::vector<Matrix<Polynomial<F>>> coding;
};

template <ExactScalar F>
LinearSystem<F> linearize(const ChannelInstance<F>& ch, const SchemeSpec& spec,
                          const Pins<F>& pins, const typename F::Context& ctx) {
  spec.check_channel(ch);
  const auto all_names = coding_variable_names(spec, ch.K);
  const std::size_t per = static_cast<std::size_t>(ch.K * spec.M * spec.M);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < pins.size(); ++k) {
    if (pins[k]) continue;
    for (std::size_t v = 0; v < per; ++v) names.push_back(all_names[k * per + v]);
  }
  auto ring = PolynomialRing<F>::make(names, ctx);
  const std::size_t n = ch.dim();
  std::vector<Matrix<Polynomial<F>>> coding;
  std::size_t var = 0;
  for (const auto& pin : pins) {
    Matrix<Polynomial<F>> m(n, n, Polynomial<F>(ring));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i / spec.M != j / spec.M) continue;
        m(i, j) = pin ? Polynomial<F>::constant(ring, (*pin)(i, j))
                      : Polynomial<F>::variable(ring, var++);
      }
    }
    coding.push_back(std::move(m));
  }
  auto lifted = lift<Polynomial<F>>(
      ch, [&](const F& s) { return Polynomial<F>::constant(ring, s); });
  LinearSystem<F> sys;
  sys.ring = ring;
  sys.B = effective_matrix(spec, lifted, coding);
  auto eqs = alignment_equations(sys.B, lifted.H, ch.K, ch.M);
  sys.A = Matrix<F>(eqs.size(), names.size(), ctx.zero());
  for (std::size_t r = 0; r < eqs.size(); ++r) {
    auto row = linear_coefficients(eqs[r]);
    for (std::size_t c = 0; c < row.size(); ++c) sys.A(r, c) = row[c];
  }
  // For M > 1 the forms are determinants of dense linear forms; those are
  // evaluated numerically per candidate point instead.
  if (ch.M == 1) sys.desired = desired_signal_forms(sys.B, lifted.H, ch.K, 1);
  sys.H = ch.H;
  sys.K = ch.K;
  sys.M = ch.M;
  sys.coding = std::move(coding);
  return sys;
}

template <ExactScalar F>
std::vector<F> combine(const std::vector<std::vector<F>>& basis,
                       const std::vector<std::int64_t>& coeffs, const F& zero) {
  std::vector<F> x(basis.front().size(), zero);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (coeffs[k] == 0) continue;
    const F c = zero.context().from_int(coeffs[k]);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!basis[k][i].is_zero()) x[i] += c * basis[k][i];
    }
  }
  return x;
}

/// Diagnostics of the linear system: ranks, bad subspaces, trivial check.
template <ExactScalar F>
LinearDiagnostics diagnose(const LinearSystem<F>& sys,
                           const std::vector<std::vector<F>>& basis,
                           const std::vector<F>& trivial) {
  LinearDiagnostics d;
  d.unknowns = sys.A.cols();
  d.equations = sys.A.rows();
  d.nullspace_dim = basis.size();
  d.rank = d.unknowns - d.nullspace_dim;
  const F zero = sys.ring->context().zero();
  bool linear = true;
  for (const auto& g : sys.desired) {
    for (const auto& t : g.terms()) linear = linear && t.monomial.degree() == 1;
  }
  d.admits_solution = !basis.empty();
  if (linear) {
    for (const auto& g : sys.desired) {
      auto row = linear_coefficients(g);
      // Restricted to the nullspace the form is the vector (row . n_k).
      Matrix<F> R(1, std::max<std::size_t>(basis.size(), 1), zero);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        F acc = zero;
        for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * basis[k][i];
        R(0, k) = acc;
      }
      const std::size_t r = basis.empty() ? 0 : algebra::rank(R);
      d.bad_subspace_dims.push_back(basis.size() - r);
      d.admits_solution = d.admits_solution && r == 1;
    }
  }
  if (!trivial.empty() && basis.size() == 1) {
    // One-dimensional nullspace: compare with the trivial direction.
    Matrix<F> two(2, trivial.size(), zero);
    for (std::size_t i = 0; i < trivial.size(); ++i) {
      two(0, i) = trivial[i];
      two(1, i) = basis[0][i];
    }
    d.only_trivial = algebra::rank(two) == 1;
  }
  return d;
}

/// Every desired-signal form is nonzero at x.
template <ExactScalar F>
bool desired_nonzero(const LinearSystem<F>& sys, const std::vector<F>& x) {
  if (sys.M == 1) {
    for (const auto& g : sys.desired) {
      if (g.evaluate(x).is_zero()) return false;
    }
    return true;
  }
  Matrix<F> B(sys.B.rows(), sys.B.cols(), sys.ring->context().zero());
  for (std::size_t i = 0; i < B.rows(); ++i) {
    for (std::size_t j = 0; j < B.cols(); ++j) B(i, j) = sys.B(i, j).evaluate(x);
  }
  for (const auto& d : desired_signal_forms(B, sys.H, sys.K, sys.M)) {
    if (d.is_zero()) return false;
  }
  return true;
}

/// Nullspace sampler: random integer combinations of the nullspace
/// basis until every desired-signal form is nonzero.
template <ExactScalar F>
std::optional<std::vector<F>> sample_nullspace(
    const LinearSystem<F>& sys, const std::vector<std::vector<F>>& basis,
    std::uint64_t seed, std::size_t max_attempts, std::size_t& attempts) {
  if (basis.empty()) return std::nullopt;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  const F zero = sys.ring->context().zero();
  for (attempts = 1; attempts <= max_attempts; ++attempts) {
    std::vector<std::int64_t> c(basis.size());
    for (auto& v : c) v = dist(rng);
    auto x = combine(basis, c, zero);
    if (desired_nonzero(sys, x)) return x;
  }
  attempts = max_attempts;
  return std::nullopt;
}

/// Numeric coding matrices from the pins and an assignment of the unknowns.
template <ExactScalar F>
std::vector<Matrix<F>> instantiate(const LinearSystem<F>& sys,
                                   const std::vector<F>& x) {
  std::vector<Matrix<F>> out;
  const F zero = sys.ring->context().zero();
  for (const auto& m : sys.coding) {
    Matrix<F> num(m.rows(), m.cols(), zero);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) num(i, j) = m(i, j).evaluate(x);
    }
    out.push_back(std::move(num));
  }
  return out;
}

}  // namespace detail

/// Retries of the nullspace sampler before SamplerExhausted.
inline constexpr std::size_t kSamplerRetries = 64;

/// Three users, out-of-band. D_1 is pinned to the rank-one diagonal
/// e_pin e_pin^T (default diag(1, 0, 0)); the three alignment equations are
/// then homogeneous linear in the six entries of D_2 and D_3. Generic
/// channels give rank 3 (solution space of dimension 3) and each inequality
/// fails on a dimension-2 subspace; the sampler picks a point off all of
/// them.
template <ExactScalar F>
LinearSolveResult<F> solve_3user_linear(const ChannelInstance<F>& ch,
                                        std::uint64_t seed,
                                        const typename F::Context& ctx = {},
                                        std::size_t pin = 0) {
  ch.validate();
  if (ch.K != 3 || ch.M != 1 || ch.mode != Mode::out_of_band) {
    throw Unsupported("solve_3user_linear needs K = 3, M = 1, out-of-band");
  }
  if (pin >= 3) throw InvalidArgument("pin index out of range");
  const auto spec = SchemeSpec::three_phase();
  std::vector<F> d1(3, ctx.zero());
  d1[pin] = ctx.one();
  detail::Pins<F> pins{Matrix<F>::diagonal(d1, ctx.zero()), std::nullopt,
                       std::nullopt};
  auto sys = detail::linearize(ch, spec, pins, ctx);
  const auto basis = algebra::nullspace(sys.A, ctx.zero(), ctx.one());
  // Trivial direction: D_2 = I, D_3 = 0 gives B = H.
  std::vector<F> trivial{ctx.one(), ctx.one(), ctx.one(),
                         ctx.zero(), ctx.zero(), ctx.zero()};
  LinearSolveResult<F> out;
  out.diagnostics = detail::diagnose(sys, basis, trivial);
  const auto& d = out.diagnostics;
  if (d.rank != 3) {
    throw NonGenericInstance("3-user system has rank " +
                             std::to_string(d.rank) + ", expected 3");
  }
  for (std::size_t dim : d.bad_subspace_dims) {
    if (dim != 2) {
      throw NonGenericInstance("an inequality subspace has dimension " +
                               std::to_string(dim) + ", expected 2");
    }
  }
  auto x = detail::sample_nullspace(sys, basis, seed, kSamplerRetries,
                                    out.diagnostics.attempts);
  if (!x) throw SamplerExhausted("no nullspace point met every inequality");
  out.solution = complete_solution(ch, spec, detail::instantiate(sys, *x));
  return out;
}

/// Rank data of the full-duplex two-phase scheme (all three coding matrices
/// unknown), for any K and M. The trivial direction is D_1 = I.
template <ExactScalar F>
LinearDiagnostics diagnose_in_band(const ChannelInstance<F>& ch,
                                   const typename F::Context& ctx = {}) {
  ch.validate();
  const auto spec = SchemeSpec::in_band(ch.M);
  detail::Pins<F> pins(3);
  auto sys = detail::linearize(ch, spec, pins, ctx);
  const auto basis = algebra::nullspace(sys.A, ctx.zero(), ctx.one());
  std::vector<F> trivial(sys.A.cols(), ctx.zero());
  const std::size_t M = static_cast<std::size_t>(ch.M);
  for (std::size_t i = 0; i < static_cast<std::size_t>(ch.K); ++i) {
    for (std::size_t a = 0; a < M; ++a) trivial[i * M * M + a * M + a] = ctx.one();
  }
  return detail::diagnose(sys, basis, trivial);
}

namespace detail {

template <ExactScalar F>
LinearSolveResult<F> solve_in_band_any(const ChannelInstance<F>& ch,
                                       std::uint64_t seed,
                                       const typename F::Context& ctx) {
  const auto spec = SchemeSpec::in_band(ch.M);
  Pins<F> pins(3);
  auto sys = linearize(ch, spec, pins, ctx);
  const auto basis = algebra::nullspace(sys.A, ctx.zero(), ctx.one());
  LinearSolveResult<F> out;
  out.diagnostics = diagnose(sys, basis, std::vector<F>{});
  out.diagnostics.admits_solution = !basis.empty();
  auto x = sample_nullspace(sys, basis, seed, kSamplerRetries,
                            out.diagnostics.attempts);
  if (!x) {
    if (ch.M > 1) {
      throw SingularCombining("every sampled point left a destination with a "
                              "singular combining matrix");
    }
    throw SamplerExhausted("no nullspace point met every inequality");
  }
  out.solution = complete_solution(ch, spec, instantiate(sys, *x));
  return out;
}

/// Exact Q(i) path for large systems. Pivot columns come from elimination
/// modulo a random prime; free coordinates get random integers and the
/// pivot coordinates are solved exactly by fraction-free elimination. A
/// prime dividing some minor shows up as a singular or inconsistent exact
/// system and is replaced.
inline LinearSolveResult<GaussianRational> solve_in_band_fraction_free(
    const ExactChannel& ch, std::uint64_t seed) {
  const auto spec = SchemeSpec::in_band(ch.M);
  const GaussianRational::Context ctx;
  Pins<GaussianRational> pins(3);
  auto sys = linearize(ch, spec, pins, ctx);
  const std::size_t n = sys.A.cols();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  LinearSolveResult<GaussianRational> out;
  out.diagnostics.unknowns = n;
  out.diagnostics.equations = sys.A.rows();
  for (std::size_t attempt = 1; attempt <= kSamplerRetries; ++attempt) {
    out.diagnostics.attempts = attempt;
    std::optional<algebra::PrimeFieldContext> fp;
    try {
      fp = algebra::PrimeFieldContext::random_31bit(rng);
      Matrix<algebra::PrimeFieldElement> Ap(sys.A.rows(), n, fp->zero());
      for (std::size_t i = 0; i < Ap.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) Ap(i, j) = fp->map(sys.A(i, j));
      }
      const auto pivots = algebra::rref(Ap).pivots;
      std::vector<bool> is_pivot(n, false);
      for (auto p : pivots) is_pivot[p] = true;
      std::vector<GaussianRational> x(n);
      Matrix<GaussianRational> AP(sys.A.rows(), pivots.size(), ctx.zero());
      std::vector<GaussianRational> b(sys.A.rows(), ctx.zero());
      for (std::size_t j = 0; j < n; ++j) {
        if (is_pivot[j]) continue;
        x[j] = ctx.from_int(dist(rng));
        for (std::size_t i = 0; i < sys.A.rows(); ++i) b[i] -= sys.A(i, j) * x[j];
      }
      for (std::size_t i = 0; i < sys.A.rows(); ++i) {
        for (std::size_t k = 0; k < pivots.size(); ++k) {
          AP(i, k) = sys.A(i, pivots[k]);
        }
      }
      // The system is homogeneous, so the integral multiple d x serves as
      // well as x and keeps later arithmetic free of large denominators.
      auto xp = algebra::solve_multimodular_scaled(AP, b, rng());
      if (!xp) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!is_pivot[j]) x[j] *= xp->d;
      }
      for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = xp->y[k];
      out.diagnostics.rank = pivots.size();
      out.diagnostics.nullspace_dim = n - pivots.size();
      out.diagnostics.admits_solution = true;
      if (!desired_nonzero(sys, x)) continue;
      out.solution = complete_solution(ch, spec, instantiate(sys, x));
      return out;
    } catch (const NonGenericInstance&) {
      continue;  // a channel denominator vanished modulo the prime
    }
  }
  throw SingularCombining("every sampled point left a destination with a "
                          "singular combining matrix");
}

}  // namespace detail

/// Full-duplex two-phase scheme, single antenna, K = 3 or 4: the alignment
/// equations are linear in D_1, D_2, D_3 jointly.
template <ExactScalar F>
LinearSolveResult<F> solve_inband_linear(const ChannelInstance<F>& ch,
                                         std::uint64_t seed,
                                         const typename F::Context& ctx = {}) {
  ch.validate();
  if (ch.mode != Mode::in_band || ch.M != 1) {
    throw Unsupported("solve_inband_linear needs an in-band channel, M = 1");
  }
  if (ch.K != 3 && ch.K != 4) {
    throw Unsupported("the linear in-band construction covers K = 3, 4 only; "
                      "use diagnose_in_band for larger K");
  }
  auto out = detail::solve_in_band_any(ch, seed, ctx);
  if (out.diagnostics.rank != out.diagnostics.equations) {
    throw NonGenericInstance("in-band alignment equations are dependent");
  }
  return out;
}

/// Default largest antenna count for solve_mimo.
inline constexpr int kMaxDeskScaleM = 3;

/// Four users, M antennas, full duplex, block-diagonal coding matrices.
/// KM((K-1)M - 1) linear equations in 3KM^2 unknowns; the sampler rejects
/// points where some destination's M x M combining matrix is singular.
template <ExactScalar F>
LinearSolveResult<F> solve_mimo(const ChannelInstance<F>& ch,
                                std::uint64_t seed,
                                const typename F::Context& ctx = {},
                                int max_M = kMaxDeskScaleM) {
  ch.validate();
  if (ch.mode != Mode::in_band || ch.K != 4) {
    throw Unsupported("solve_mimo needs K = 4 in-band");
  }
  if (ch.M > max_M) {
    throw Unsupported("M = " + std::to_string(ch.M) +
                      " is beyond the configured scale cap " +
                      std::to_string(max_M));
  }
  if constexpr (std::is_same_v<F, GaussianRational>) {
    if (ch.M > 1) return detail::solve_in_band_fraction_free(ch, seed);
  }
  return detail::solve_in_band_any(ch, seed, ctx);
}

// ---------------------------------------------------------------------------
// Multi-phase counting

struct MultiphasePlan {
  int K = 0;
  int N = 0;            // forward phases
  long long N_v = 0;    // free coding variables
  long long N_e = 0;    // alignment equations
  double dof = 0.0;     // K / (2N); conjectured, not proven achievable
  bool conjectural = true;
};

/// Smallest N with (N^2 - 1) K >= K (K - 2), i.e. N = ceil(sqrt(K - 1)).
/// Only a count: solvability of the resulting system is not claimed.
inline MultiphasePlan multiphase_plan(int K) {
  if (K < 2) throw InvalidArgument("need K >= 2");
  MultiphasePlan p;
  p.K = K;
  p.N = 1;
  while (static_cast<long long>(p.N) * p.N < K - 1) ++p.N;
  p.N_v = (static_cast<long long>(p.N) * p.N - 1) * K;
  p.N_e = static_cast<long long>(K) * (K - 2);
  p.dof = static_cast<double>(K) / (2.0 * p.N);
  p.conjectural = K > 2;
  return p;
}

}  // namespace iia::schemes
