#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "iia/channels.hpp"
#include "iia/errors.hpp"
#include "iia/schemes/scheme.hpp"
#include "iia/schemes/solution.hpp"

namespace iia::ratesim {

using channels::Complex;
using channels::FloatChannel;
using schemes::AlignmentSolution;
using schemes::SchemeSpec;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct PowerConfig {
  double P = 1.0;      // per node, per slot
  double noise = 1.0;  // sigma^2 per receive antenna per slot

  static PowerConfig from_snr_db(double snr_db, double noise = 1.0) {
    return {noise * std::pow(10.0, snr_db / 10.0), noise};
  }
  double snr_db() const { return 10.0 * std::log10(P / noise); }
  void validate() const {
    if (!(P > 0.0) || !(noise > 0.0)) {
      throw InvalidArgument("power and noise variance must be positive");
    }
  }
};

struct Accounting {
  /// Add the reverse slots to the rate divisor.
  bool charge_feedback = false;
  /// Time sharing bursts K P during its own slot.
  bool boosted_time_sharing = false;
};

/// Slots the sum rate is divided by.
inline int rate_divisor(const SchemeSpec& spec, const Accounting& acc) {
  return spec.forward_slots() + (acc.charge_feedback ? spec.reverse_slots() : 0);
}

namespace detail {

inline CMatrix to_eigen(const algebra::Matrix<Complex>& m) {
  CMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

inline algebra::Matrix<Complex> diag_matrix(const CVector& d) {
  std::vector<Complex> v(d.data(), d.data() + d.size());
  return algebra::Matrix<Complex>::diagonal(v, Complex(0.0));
}

inline CVector diag_of(const algebra::Matrix<Complex>& m) {
  CVector d(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) d(i) = m(i, i);
  return d;
}

/// Three-phase design in Eigen form: coding diagonals, effective matrix and
/// per-destination combiner.
struct Design {
  CVector d1, d2, d3;
  CMatrix B;
  CVector lambda;
};

inline void check_three_phase(const FloatChannel& ch) {
  ch.validate();
  if (ch.mode != channels::Mode::out_of_band || ch.M != 1) {
    throw Unsupported("rate simulation covers the single-antenna three-phase "
                      "scheme");
  }
}

inline Design make_design(const CMatrix& H, const CMatrix& G, CVector d1,
                          CVector d2, CVector d3) {
  Design d{std::move(d1), std::move(d2), std::move(d3), {}, {}};
  d.B = H * d.d2.asDiagonal() +
        H * d.d3.asDiagonal() * G * d.d1.asDiagonal() * H;
  const auto K = H.rows();
  d.lambda.resize(K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const Eigen::Index p = i == 0 ? 1 : 0;
    d.lambda(i) = d.B(i, p) / H(i, p);
  }
  return d;
}

inline Design design_from(const FloatChannel& ch,
                          const AlignmentSolution<Complex>& sol) {
  if (sol.spec.kind != schemes::SchemeKind::three_phase) {
    throw Unsupported("rate simulation covers the three-phase scheme");
  }
  return make_design(to_eigen(ch.H), to_eigen(*ch.G), diag_of(sol.coding[0]),
                     diag_of(sol.coding[1]), diag_of(sol.coding[2]));
}

inline AlignmentSolution<Complex> to_solution(const FloatChannel& ch,
                                              const Design& d) {
  return schemes::complete_solution(
      ch, SchemeSpec::three_phase(),
      {diag_matrix(d.d1), diag_matrix(d.d2), diag_matrix(d.d3)});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Powers and SINR

struct PhasePowers {
  std::vector<double> phase1;  // sources
  std::vector<double> phase2;  // destinations (reverse band)
  std::vector<double> phase3;  // sources
  double max() const {
    double m = 0.0;
    for (const auto* v : {&phase1, &phase2, &phase3}) {
      for (double x : *v) m = std::max(m, x);
    }
    return m;
  }
};

namespace detail {

/// Second moments of every transmission: E|y_j|^2 feeds phase 2, and the
/// phase-3 signal d2_j x_j + d3_j f_j keeps its x-f correlation.
inline PhasePowers powers_of(const CMatrix& H, const CMatrix& G,
                             const Design& d, double P_sym, double noise) {
  const auto K = H.rows();
  PhasePowers pw;
  const CMatrix GD1 = G * d.d1.asDiagonal();
  const CMatrix GD1H = GD1 * H;
  for (Eigen::Index j = 0; j < K; ++j) {
    pw.phase1.push_back(P_sym);
    const double ey = H.row(j).squaredNorm() * P_sym + noise;
    pw.phase2.push_back(std::norm(d.d1(j)) * ey);
    double signal = 0.0;
    for (Eigen::Index l = 0; l < K; ++l) {
      const Complex c = (l == j ? d.d2(j) : Complex(0.0)) + d.d3(j) * GD1H(j, l);
      signal += std::norm(c);
    }
    const double fb_noise = GD1.row(j).squaredNorm() + 1.0;
    pw.phase3.push_back(signal * P_sym +
                        std::norm(d.d3(j)) * fb_noise * noise);
  }
  return pw;
}

/// Noise variance after combining, per destination: the phase-1 noise n
/// enters both observations and is tracked jointly.
inline std::vector<double> noise_of(const CMatrix& H, const CMatrix& G,
                                    const Design& d, double noise) {
  const auto K = H.rows();
  const CMatrix HD3 = H * d.d3.asDiagonal();
  const CMatrix T = HD3 * G * d.d1.asDiagonal();
  std::vector<double> out;
  for (Eigen::Index i = 0; i < K; ++i) {
    double v = 1.0 + HD3.row(i).squaredNorm();
    for (Eigen::Index k = 0; k < K; ++k) {
      v += std::norm(T(i, k) - (k == i ? d.lambda(i) : Complex(0.0)));
    }
    out.push_back(noise * v);
  }
  return out;
}

inline std::vector<double> sinr_of(const CMatrix& H, const CMatrix& G,
                                   const Design& d, double P_sym,
                                   double noise) {
  const auto nv = noise_of(H, G, d, noise);
  const auto K = H.rows();
  std::vector<double> out;
  for (Eigen::Index i = 0; i < K; ++i) {
    double interference = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j != i) interference += std::norm(d.B(i, j) - d.lambda(i) * H(i, j));
    }
    const double signal = std::norm(d.B(i, i) - d.lambda(i) * H(i, i));
    out.push_back(signal * P_sym / (interference * P_sym + nv[i]));
  }
  return out;
}

/// Scale D1 (with D3 inversely, so B is unchanged) until the strongest
/// destination transmits exactly P in phase 2, then scale (D2, D3) until the
/// strongest source transmits exactly P in phase 3. Both powers are
/// homogeneous of degree 2 in their scale, so the scales are closed form.
inline Design normalize(const CMatrix& H, const CMatrix& G, Design d,
                        double P_sym, double P, double noise, double* a_out,
                        double* b_out) {
  const auto pw0 = powers_of(H, G, d, P_sym, noise);
  const double m2 = *std::max_element(pw0.phase2.begin(), pw0.phase2.end());
  const double a = m2 > 0.0 ? std::sqrt(P / m2) : 1.0;
  CVector d1 = d.d1 * a;
  CVector d3 = d.d3 / a;
  Design scaled = make_design(H, G, d1, d.d2, d3);
  const auto pw1 = powers_of(H, G, scaled, P_sym, noise);
  const double m3 = *std::max_element(pw1.phase3.begin(), pw1.phase3.end());
  const double b = m3 > 0.0 ? std::sqrt(P / m3) : 1.0;
  if (a_out != nullptr) *a_out = a;
  if (b_out != nullptr) *b_out = b;
  return make_design(H, G, scaled.d1, scaled.d2 * b, scaled.d3 * b);
}

}  // namespace detail

struct PoweredSolution {
  AlignmentSolution<Complex> solution;
  double P_sym = 0.0;
  PhasePowers powers;
  double d1_scale = 1.0;   // factor applied to D1 (D3 divided by it)
  double d23_scale = 1.0;  // factor applied to (D2, D3)
};

namespace detail {

inline void require_verified(const FloatChannel& ch,
                             const AlignmentSolution<Complex>& sol) {
  if (!schemes::verify_alignment(ch, sol).ok) {
    throw InvalidArgument("solution does not pass verify_alignment");
  }
}

}  // namespace detail

/// Symbols at P_sym = P; D1 and (D2, D3) scaled so every node stays within
/// P per slot with the strongest node of each phase exactly at P. Scaling
/// preserves alignment (B and lambda scale together).
inline PoweredSolution apply_power_constraints(
    const FloatChannel& ch, const AlignmentSolution<Complex>& sol,
    const PowerConfig& power) {
  power.validate();
  detail::check_three_phase(ch);
  detail::require_verified(ch, sol);
  const CMatrix H = detail::to_eigen(ch.H), G = detail::to_eigen(*ch.G);
  PoweredSolution out;
  out.P_sym = power.P;
  const auto d = detail::normalize(H, G, detail::design_from(ch, sol),
                                   out.P_sym, power.P, power.noise,
                                   &out.d1_scale, &out.d23_scale);
  out.powers = detail::powers_of(H, G, d, out.P_sym, power.noise);
  out.solution = detail::to_solution(ch, d);
  return out;
}

/// Transmit powers of a solution as is (no rescaling).
inline PhasePowers transmit_powers(const FloatChannel& ch,
                                   const AlignmentSolution<Complex>& sol,
                                   double P_sym, double noise) {
  detail::check_three_phase(ch);
  return detail::powers_of(detail::to_eigen(ch.H), detail::to_eigen(*ch.G),
                           detail::design_from(ch, sol), P_sym, noise);
}

/// Analytic post-combining noise variance per destination.
inline std::vector<double> noise_variances(
    const FloatChannel& ch, const AlignmentSolution<Complex>& sol,
    double noise) {
  detail::check_three_phase(ch);
  return detail::noise_of(detail::to_eigen(ch.H), detail::to_eigen(*ch.G),
                          detail::design_from(ch, sol), noise);
}

/// SINR of each destination combining y'_i - lambda_i y_i, with symbols of
/// power P_sym = power.P. Residual interference (zero up to rounding for a
/// verified solution) is counted as noise.
inline std::vector<double> effective_sinr(
    const FloatChannel& ch, const AlignmentSolution<Complex>& sol,
    const PowerConfig& power) {
  power.validate();
  detail::check_three_phase(ch);
  detail::require_verified(ch, sol);
  return detail::sinr_of(detail::to_eigen(ch.H), detail::to_eigen(*ch.G),
                         detail::design_from(ch, sol), power.P, power.noise);
}

struct RateReport {
  std::vector<double> sinr;
  std::vector<double> rates;  // log2(1 + SINR_i) / divisor
  double sum_rate = 0.0;
  double time_sharing = 0.0;
  int divisor = 2;
  double P_sym = 0.0;
  PhasePowers powers;
};

/// Baseline: each user alone in 1/K of the slots at per-slot power P
/// (K P when boosted).
inline double time_sharing_rate(const FloatChannel& ch,
                                const PowerConfig& power,
                                bool boosted = false) {
  power.validate();
  const std::size_t K = static_cast<std::size_t>(ch.K);
  const double burst = boosted ? static_cast<double>(K) : 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    sum += std::log2(1.0 + std::norm(ch.H(i, i)) * burst * power.P /
                               power.noise);
  }
  return sum / static_cast<double>(K);
}

namespace detail {

inline double sum_rate(const std::vector<double>& sinr, int divisor) {
  double s = 0.0;
  for (double x : sinr) s += std::log2(1.0 + x);
  return s / divisor;
}

}  // namespace detail

/// Power-normalize a verified solution and report its rates.
inline RateReport evaluate(const FloatChannel& ch,
                           const AlignmentSolution<Complex>& sol,
                           const PowerConfig& power, const Accounting& acc = {},
                           AlignmentSolution<Complex>* scaled = nullptr) {
  auto ps = apply_power_constraints(ch, sol, power);
  RateReport r;
  r.divisor = rate_divisor(ps.solution.spec, acc);
  r.P_sym = ps.P_sym;
  r.powers = ps.powers;
  r.sinr = detail::sinr_of(detail::to_eigen(ch.H), detail::to_eigen(*ch.G),
                           detail::design_from(ch, ps.solution), ps.P_sym,
                           power.noise);
  for (double x : r.sinr) r.rates.push_back(std::log2(1.0 + x) / r.divisor);
  r.sum_rate = detail::sum_rate(r.sinr, r.divisor);
  r.time_sharing = time_sharing_rate(ch, power, acc.boosted_time_sharing);
  if (scaled != nullptr) *scaled = std::move(ps.solution);
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo noise oracle

struct NoiseSample {
  std::vector<double> variance;        // sample variance of the residual
  std::vector<double> standard_error;  // of that variance
  std::vector<double> sinr;            // |c_i|^2 P_sym / variance
};

/// Run the three phases with random symbols and noise and measure the
/// residual z_i - c_i x_i of each destination's combination.
inline NoiseSample simulate_noise(const FloatChannel& ch,
                                  const AlignmentSolution<Complex>& sol,
                                  double P_sym, double noise, std::size_t draws,
                                  std::uint64_t seed) {
  detail::check_three_phase(ch);
  if (draws < 2) throw InvalidArgument("need at least two draws");
  const CMatrix H = detail::to_eigen(ch.H), G = detail::to_eigen(*ch.G);
  const auto d = detail::design_from(ch, sol);
  const auto K = H.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto cn = [&](double var) {
    const double s = std::sqrt(var / 2.0);
    const double re = gauss(rng) * s;
    const double im = gauss(rng) * s;
    return Complex(re, im);
  };
  CVector x(K), n(K), nt(K), nh(K);
  std::vector<double> sum(K, 0.0), sum_sq(K, 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    for (Eigen::Index k = 0; k < K; ++k) {
      x(k) = cn(P_sym);
      n(k) = cn(noise);
      nt(k) = cn(noise);
      nh(k) = cn(noise);
    }
    const CVector y = H * x + n;
    const CVector f = G * (d.d1.asDiagonal() * y) + nt;
    const CVector s3 = d.d2.asDiagonal() * x + d.d3.asDiagonal() * f;
    const CVector y3 = H * s3 + nh;
    for (Eigen::Index i = 0; i < K; ++i) {
      const Complex c = d.B(i, i) - d.lambda(i) * H(i, i);
      const Complex r = y3(i) - d.lambda(i) * y(i) - c * x(i);
      const double e = std::norm(r);
      sum[i] += e;
      sum_sq[i] += e * e;
    }
  }
  NoiseSample out;
  const double N = static_cast<double>(draws);
  for (Eigen::Index i = 0; i < K; ++i) {
    const double mean = sum[i] / N;
    const double var_e = std::max(0.0, sum_sq[i] / N - mean * mean);
    out.variance.push_back(mean);
    out.standard_error.push_back(std::sqrt(var_e / N));
    const Complex c = d.B(i, i) - d.lambda(i) * H(i, i);
    out.sinr.push_back(std::norm(c) * P_sym / mean);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solution family and optimizer

/// Three-phase alignment solutions of a float channel, K = 3 or 4, as a
/// map from free complex parameters. d1_1 = 1 throughout (power
/// normalization fixes the scale of D1).
///
/// K = 3: parameters (d1_2, d1_3, d2_1, d2_2, d2_3); the six alignment
/// conditions B_ij = lambda_i H_ij are then linear in (d3, lambda) and
/// solved directly.
///
/// K = 4: parameters (d1_2, d1_3, d1_4, alpha). Only D1 on a hypersurface admit a
/// solution besides B = H; a min-norm complex Newton iteration moves D1 onto
/// it together with a null vector v (v_d2_1 = 0, v_d3_1 = 1), and the
/// solution is alpha (trivial direction) + v.
class SolutionFamily {
 public:
  struct Point {
    CVector params;
    CVector v;  // K = 4: current null vector (warm start)
    detail::Design design;
  };

  explicit SolutionFamily(const FloatChannel& ch)
      : ch_(ch), H_(detail::to_eigen(ch.H)) {
    detail::check_three_phase(ch);
    if (ch.K != 3 && ch.K != 4) {
      throw Unsupported("solution family needs K = 3 or 4 (no generic "
                        "three-phase solution for K >= 5)");
    }
    G_ = detail::to_eigen(*ch.G);
    K_ = H_.rows();
  }

  Eigen::Index num_params() const { return K_ == 3 ? 5 : 4; }

  /// Random starting point on the family; nullopt after repeated failure.
  template <class Rng>
  std::optional<Point> random_point(Rng& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&] {
      const double re = gauss(rng);
      const double im = gauss(rng);
      return Complex(re, im);
    };
    for (int attempt = 0; attempt < 64; ++attempt) {
      CVector p(num_params());
      for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = draw();
      CVector v;
      if (K_ == 4) {
        v = CVector(3 * K_);
        for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = draw();
      }
      if (auto pt = realize(p, v)) return pt;
    }
    return std::nullopt;
  }

  /// Point for parameters `p` (K = 4: projected onto the solvable curve
  /// starting from null vector `v`).
  std::optional<Point> realize(const CVector& p, const CVector& v) const {
    return K_ == 3 ? realize3(p) : realize4(p, v);
  }

  /// Numeric solution of the point.
  AlignmentSolution<Complex> solution(const Point& pt) const {
    return detail::to_solution(ch_, pt.design);
  }

  const CMatrix& H() const { return H_; }
  const CMatrix& G() const { return G_; }

 private:
  // Alignment system rows (i, j), i != j, over unknowns (d2, d3, lambda).
  CMatrix system(const CVector& d1) const {
    const CMatrix T = G_ * d1.asDiagonal() * H_;
    CMatrix M = CMatrix::Zero(K_ * (K_ - 1), 3 * K_);
    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < K_; ++i) {
      for (Eigen::Index j = 0; j < K_; ++j) {
        if (i == j) continue;
        M(row, j) = H_(i, j);
        for (Eigen::Index k = 0; k < K_; ++k) M(row, K_ + k) = H_(i, k) * T(k, j);
        M(row, 2 * K_ + i) = -H_(i, j);
        ++row;
      }
    }
    return M;
  }

  bool admissible(const detail::Design& d) const {
    double scale = d.B.norm() + H_.norm();
    for (Eigen::Index i = 0; i < K_; ++i) {
      if (std::abs(d.B(i, i) - d.lambda(i) * H_(i, i)) <= 1e-9 * scale) {
        return false;
      }
    }
    return d.B.allFinite();
  }

  CVector d1_of(const CVector& p, Eigen::Index count) const {
    CVector d1(K_);
    d1(0) = 1.0;
    for (Eigen::Index k = 1; k < K_; ++k) d1(k) = p(k - 1);
    (void)count;
    return d1;
  }

  std::optional<Point> realize3(const CVector& p) const {
    const CVector d1 = d1_of(p, 2);
    const CVector d2 = p.segment(2, 3);
    const CMatrix M = system(d1);
    // Unknowns (d3, lambda); d2 moves to the right-hand side.
    const CMatrix A = M.rightCols(2 * K_);
    const CVector rhs = -M.leftCols(K_) * d2;
    Eigen::FullPivLU<CMatrix> lu(A);
    if (lu.rank() < A.cols()) return std::nullopt;
    const CVector sol = lu.solve(rhs);
    if (!sol.allFinite() || (A * sol - rhs).norm() > 1e-8 * (rhs.norm() + 1.0)) {
      return std::nullopt;
    }
    Point pt{p, {}, detail::make_design(H_, G_, d1, d2, sol.head(K_))};
    if (!admissible(pt.design)) return std::nullopt;
    return pt;
  }

  std::optional<Point> realize4(const CVector& p, CVector v) const {
    const Eigen::Index n = 3 * K_;
    CVector d1 = d1_of(p, 3);
    if (v.size() != n) return std::nullopt;
    v(0) = 0.0;   // v_d2_1
    v(K_) = 1.0;  // v_d3_1
    // Free unknowns: d1_2..d1_K, then v without entries 0 and K.
    std::vector<Eigen::Index> vfree;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != 0 && k != K_) vfree.push_back(k);
    }
    bool converged = false;
    for (int it = 0; it < 40; ++it) {
      const CMatrix M = system(d1);
      const CVector F = M * v;
      const double tol = 1e-12 * (M.norm() * v.norm() + 1.0);
      if (F.norm() <= tol) {
        converged = true;
        break;
      }
      CMatrix J(M.rows(), (K_ - 1) + static_cast<Eigen::Index>(vfree.size()));
      // d/d d1_l of row (i, j): sum_k H_ik v_d3k G_kl H_lj
      Eigen::Index row = 0;
      for (Eigen::Index i = 0; i < K_; ++i) {
        for (Eigen::Index j = 0; j < K_; ++j) {
          if (i == j) continue;
          for (Eigen::Index l = 1; l < K_; ++l) {
            Complex s = 0.0;
            for (Eigen::Index k = 0; k < K_; ++k) {
              s += H_(i, k) * v(K_ + k) * G_(k, l);
            }
            J(row, l - 1) = s * H_(l, j);
          }
          ++row;
        }
      }
      for (std::size_t c = 0; c < vfree.size(); ++c) {
        J.col(K_ - 1 + static_cast<Eigen::Index>(c)) = M.col(vfree[c]);
      }
      const CVector step = J.completeOrthogonalDecomposition().solve(-F);
      if (!step.allFinite()) return std::nullopt;
      for (Eigen::Index l = 1; l < K_; ++l) d1(l) += step(l - 1);
      for (std::size_t c = 0; c < vfree.size(); ++c) {
        v(vfree[c]) += step(K_ - 1 + static_cast<Eigen::Index>(c));
      }
      if (!d1.allFinite() || !v.allFinite() || v.norm() > 1e8) {
        return std::nullopt;
      }
    }
    if (!converged) return std::nullopt;
    const Complex alpha = p(K_ - 1);
    CVector d2 = v.head(K_);
    d2.array() += alpha;
    const CVector d3 = v.segment(K_, K_);
    CVector projected = p;
    for (Eigen::Index l = 1; l < K_; ++l) projected(l - 1) = d1(l);
    Point pt{projected, v, detail::make_design(H_, G_, d1, d2, d3)};
    if (!admissible(pt.design)) return std::nullopt;
    return pt;
  }

  FloatChannel ch_;
  CMatrix H_;
  CMatrix G_;
  Eigen::Index K_ = 0;
};

struct OptimizerOptions {
  std::size_t restarts = 8;
  std::size_t iterations = 400;
  std::uint64_t seed = 0;
  Accounting accounting;
  /// Start of the first restart instead of a random point (warm start
  /// across an SNR grid).
  std::optional<CVector> initial;
  std::optional<CVector> initial_v;
};

struct OptimizeResult {
  AlignmentSolution<Complex> solution;  // power-normalized
  RateReport report;
  double seed_rate = 0.0;  // rate of the first restart's starting point
  /// Best-so-far rate after each iteration, concatenated over restarts.
  std::vector<double> trace;
  CVector best_params;
  CVector best_v;
};

namespace detail {

inline double objective(const SolutionFamily& fam, const Design& d,
                        const PowerConfig& power, int divisor) {
  const Design n = normalize(fam.H(), fam.G(), d, power.P, power.P,
                             power.noise, nullptr, nullptr);
  return sum_rate(sinr_of(fam.H(), fam.G(), n, power.P, power.noise), divisor);
}

}  // namespace detail

/// Derivative-free local search over the solution family: per restart,
/// Gaussian perturbations with an adaptive step (grow on success, shrink on
/// failure), keeping the best power-normalized sum rate.
inline OptimizeResult optimize_sum_rate(const FloatChannel& ch,
                                        const PowerConfig& power,
                                        const OptimizerOptions& opt = {}) {
  power.validate();
  if (opt.restarts == 0) throw InvalidArgument("need at least one restart");
  SolutionFamily fam(ch);
  const int divisor = rate_divisor(SchemeSpec::three_phase(), opt.accounting);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::optional<SolutionFamily::Point> best;
  double best_rate = -1.0;
  OptimizeResult out;
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    std::optional<SolutionFamily::Point> cur;
    if (r == 0 && opt.initial) {
      cur = fam.realize(*opt.initial, opt.initial_v.value_or(CVector()));
    }
    if (!cur) cur = fam.random_point(rng);
    if (!cur) continue;
    double cur_rate = detail::objective(fam, cur->design, power, divisor);
    if (r == 0) out.seed_rate = cur_rate;
    if (cur_rate > best_rate) {
      best_rate = cur_rate;
      best = cur;
    }
    double step = 0.3;
    for (std::size_t it = 0; it < opt.iterations; ++it) {
      CVector p = cur->params;
      for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        p(k) += step * (std::abs(p(k)) + 0.1) * Complex(re, im);
      }
      auto cand = fam.realize(p, cur->v);
      if (cand) {
        const double rate = detail::objective(fam, cand->design, power, divisor);
        if (rate > cur_rate) {
          cur = std::move(cand);
          cur_rate = rate;
          step = std::min(step * 1.5, 2.0);
        } else {
          step = std::max(step * 0.85, 1e-4);
        }
      } else {
        step = std::max(step * 0.85, 1e-4);
      }
      if (cur_rate > best_rate) {
        best_rate = cur_rate;
        best = cur;
      }
      out.trace.push_back(best_rate);
    }
  }
  if (!best) {
    throw NonGenericInstance("no alignment solution found for this channel");
  }
  out.best_params = best->params;
  out.best_v = best->v;
  out.report = evaluate(ch, fam.solution(*best), power, opt.accounting,
                        &out.solution);
  return out;
}

// ---------------------------------------------------------------------------
// Curves

struct CurveRow {
  double snr_db = 0.0;
  double ia_sum_rate = 0.0;
  double ts_sum_rate = 0.0;
  std::size_t trials = 0;
};

struct CurveOptions {
  int K = 3;
  bool reciprocal = false;
  std::vector<double> snr_db;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
  std::size_t iterations = 400;
  Accounting accounting;
  std::size_t jobs = 1;
};

struct TrialCurve {
  std::uint64_t channel_seed = 0;
  std::vector<RateReport> points;  // one per grid SNR
};

struct Curves {
  std::vector<CurveRow> rows;
  std::vector<TrialCurve> trials;
};

/// Parse "a:step:b" (inclusive) or a comma list into an SNR grid.
inline std::vector<double> parse_snr_grid(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || !std::isfinite(v)) {
      throw ParseError("bad SNR value '" + t + "'");
    }
    return v;
  };
  if (text.find(':') != std::string::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
      throw ParseError("SNR range must be start:step:stop");
    }
    const double start = number(text.substr(0, a));
    const double step = number(text.substr(a + 1, b - a - 1));
    const double stop = number(text.substr(b + 1));
    if (!(step > 0.0) || stop < start) {
      throw ParseError("SNR range needs step > 0 and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) out.push_back(start + step * k);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto end = comma == std::string::npos ? text.size() : comma;
    out.push_back(number(text.substr(pos, end - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

namespace detail {

inline TrialCurve run_curve_trial(const CurveOptions& opt,
                                  std::uint64_t channel_seed,
                                  std::uint64_t search_seed) {
  TrialCurve tc;
  tc.channel_seed = channel_seed;
  const FloatChannel ch = channels::sample_float(
      opt.K, 1, channels::Mode::out_of_band, opt.reciprocal, channel_seed);
  std::optional<CVector> warm, warm_v;
  std::mt19937_64 seeds(search_seed);
  for (double snr : opt.snr_db) {
    OptimizerOptions o;
    o.restarts = opt.restarts;
    o.iterations = opt.iterations;
    o.seed = seeds();
    o.accounting = opt.accounting;
    o.initial = warm;
    o.initial_v = warm_v;
    auto res = optimize_sum_rate(ch, PowerConfig::from_snr_db(snr), o);
    warm = res.best_params;
    warm_v = res.best_v;
    tc.points.push_back(std::move(res.report));
  }
  return tc;
}

}  // namespace detail

/// Average optimized IA sum rate and time-sharing rate over random float
/// channels (i.i.d. standard complex Gaussian). Each trial sweeps the grid
/// in order, warm-starting from the previous point's best parameters.
/// Deterministic per seed regardless of `jobs`.
inline Curves monte_carlo_curves(const CurveOptions& opt) {
  if (opt.trials == 0) throw InvalidArgument("need at least one trial");
  if (opt.snr_db.empty()) throw InvalidArgument("empty SNR grid");
  if (opt.K != 3 && opt.K != 4) {
    throw Unsupported("rate curves need K = 3 or 4");
  }
  std::mt19937_64 master(opt.seed);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> seeds;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto a = master();
    const auto b = master();
    seeds.emplace_back(a, b);
  }
  Curves out;
  out.trials.resize(opt.trials);
  std::vector<std::exception_ptr> errors(opt.trials);
  auto work = [&](std::size_t t) {
    try {
      out.trials[t] = detail::run_curve_trial(opt, seeds[t].first, seeds[t].second);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opt.jobs, opt.trials));
  if (jobs == 1) {
    for (std::size_t t = 0; t < opt.trials; ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t; (t = next++) < opt.trials;) work(t);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t g = 0; g < opt.snr_db.size(); ++g) {
    CurveRow row;
    row.snr_db = opt.snr_db[g];
    row.trials = opt.trials;
    for (const auto& tc : out.trials) {
      row.ia_sum_rate += tc.points[g].sum_rate;
      row.ts_sum_rate += tc.points[g].time_sharing;
    }
    row.ia_sum_rate /= static_cast<double>(opt.trials);
    row.ts_sum_rate /= static_cast<double>(opt.trials);
    out.rows.push_back(row);
  }
  return out;
}

inline std::string to_csv(const std::vector<CurveRow>& rows) {
  std::string out = "snr_db,ia_sum_rate,ts_sum_rate,trials\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.6f,%zu\n", r.snr_db,
                  r.ia_sum_rate, r.ts_sum_rate, r.trials);
    out += buf;
  }
  return out;
}

/// Least-squares slope of rate against log2(SNR) over rows with
/// lo <= snr_db <= hi.
inline double dof_slope(const std::vector<CurveRow>& rows, double lo, double hi,
                        bool ia) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.snr_db < lo - 1e-9 || r.snr_db > hi + 1e-9) continue;
    const double x = r.snr_db / (10.0 * std::log10(2.0));
    const double y = ia ? r.ia_sum_rate : r.ts_sum_rate;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw InvalidArgument("slope needs two grid points in range");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace iia::ratesim
