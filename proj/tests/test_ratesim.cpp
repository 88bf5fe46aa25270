#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "iia/ratesim.hpp"
#include "iia/schemes/solvers.hpp"
#include "oracles.hpp"

namespace {

using namespace iia;
using namespace iia::ratesim;
using algebra::GaussianRational;
using algebra::Matrix;
using channels::Complex;
using channels::Mode;
using CM = Matrix<Complex>;

using iia::testing::diag;
using iia::testing::sampled_noise;

// Direct second-moment oracle, written against plain loops.

// Per-node second moments of each phase.
PhasePowers direct_powers(const FloatChannel& ch, const AlignmentSolution<Complex>& sol,
                          double P, double noise) {
  const std::size_t K = ch.dim();
  const auto d1 = diag(sol.coding[0]), d2 = diag(sol.coding[1]), d3 = diag(sol.coding[2]);
  const CM& H = ch.H;
  const CM& G = *ch.G;
  PhasePowers pw;
  for (std::size_t j = 0; j < K; ++j) {
    pw.phase1.push_back(P);
    double ey = noise;
    for (std::size_t k = 0; k < K; ++k) ey += std::norm(H(j, k)) * P;
    pw.phase2.push_back(std::norm(d1[j]) * ey);
    // f_j = sum_l G_jl d1_l (sum_k H_lk x_k + n_l) + n~_j
    double sig = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      Complex a = k == j ? d2[j] : Complex(0.0);
      for (std::size_t l = 0; l < K; ++l) a += d3[j] * G(j, l) * d1[l] * H(l, k);
      sig += std::norm(a) * P;
    }
    double nz = std::norm(d3[j]) * noise;
    for (std::size_t l = 0; l < K; ++l) nz += std::norm(d3[j] * G(j, l) * d1[l]) * noise;
    pw.phase3.push_back(sig + nz);
  }
  return pw;
}

Complex to_c(const GaussianRational& q) {
  return {q.real().get_d(), q.imag().get_d()};
}

CM to_c(const Matrix<GaussianRational>& m) {
  CM out(m.rows(), m.cols(), Complex(0.0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_c(m(i, j));
  }
  return out;
}

// All-ones K-user closed form on the float channel.
std::pair<FloatChannel, AlignmentSolution<Complex>> all_ones(int K) {
  const auto ex = channels::build_all_ones(K);
  const auto cf = schemes::solve_rank1_closed_form(channels::all_ones_family(K));
  const auto ch = channels::to_float(ex);
  std::vector<CM> coding;
  for (const auto& D : cf.coding) coding.push_back(to_c(D));
  return {ch, schemes::complete_solution(ch, SchemeSpec::three_phase(), coding)};
}

AlignmentSolution<Complex> random_solution(const FloatChannel& ch, std::uint64_t seed) {
  SolutionFamily fam(ch);
  std::mt19937_64 rng(seed);
  auto pt = fam.random_point(rng);
  EXPECT_TRUE(pt.has_value());
  return fam.solution(*pt);
}

// ---------------------------------------------------------------------------
// SINR and noise

TEST(Sinr, AllOnesSchemeMatchesSampledCovariance) {
  auto [ch, sol] = all_ones(3);
  ASSERT_TRUE(schemes::verify_alignment(ch, sol).ok);
  const PowerConfig power{1e4, 1.0};
  const auto sinr = effective_sinr(ch, sol, power);
  const auto mc = sampled_noise(ch, sol, power.P, power.noise, 1000000, 5);
  for (std::size_t i = 0; i < 3; ++i) {
    const double c2 = std::norm(sol.B(i, i) - sol.lambda[i] * ch.H(i, i));
    const double sampled = c2 * power.P / mc.variance[i];
    EXPECT_NEAR(sinr[i] / sampled, 1.0, 0.02) << "user " << i;
  }
}

TEST(Sinr, AnalyticNoiseWithinThreeStandardErrors) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const int K = 3 + static_cast<int>(seed % 2);
    const auto ch = channels::sample_float(K, 1, Mode::out_of_band, false, seed);
    const auto sol = random_solution(ch, seed);
    const auto analytic = noise_variances(ch, sol, 0.5);
    const auto mc = sampled_noise(ch, sol, 2.0, 0.5, 100000, 100 + seed);
    for (int i = 0; i < K; ++i) {
      EXPECT_LE(std::abs(analytic[i] - mc.variance[i]), 3 * mc.se[i])
          << "seed " << seed << " user " << i;
    }
    // The library's own sampler agrees too.
    const auto lib = simulate_noise(ch, sol, 2.0, 0.5, 100000, 200 + seed);
    for (int i = 0; i < K; ++i) {
      EXPECT_LE(std::abs(analytic[i] - lib.variance[i]), 3 * lib.standard_error[i]);
    }
  }
}

TEST(Sinr, NoFeedbackPathCollapsesToDirectLink) {
  // D3 = 0 and D2 = diag(0, 0, x): lambda = 0 for every destination and
  // user 3 sees B_33 = H_33 x over plain receiver noise.
  const auto ch = channels::sample_float(3, 1, Mode::out_of_band, false, 3);
  const Complex x(0.7, -0.2);
  const auto H = detail::to_eigen(ch.H), G = detail::to_eigen(*ch.G);
  CVector d1 = CVector::Ones(3), d2 = CVector::Zero(3), d3 = CVector::Zero(3);
  d2(2) = x;
  const auto d = detail::make_design(H, G, d1, d2, d3);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(d.lambda(i), Complex(0.0));
  const double P = 10.0, noise = 0.3;
  const auto sinr = detail::sinr_of(H, G, d, P, noise);
  EXPECT_NEAR(sinr[2], std::norm(ch.H(2, 2) * x) * P / noise, 1e-9 * sinr[2]);
  const auto nv = detail::noise_of(H, G, d, noise);
  for (double v : nv) EXPECT_DOUBLE_EQ(v, noise);
}

TEST(Sinr, NoiselessLimitAndMonotoneInPower) {
  const auto ch = channels::sample_float(3, 1, Mode::out_of_band, false, 8);
  const auto sol = random_solution(ch, 8);
  const auto hi = effective_sinr(ch, sol, {1.0, 1e-12});
  for (double s : hi) EXPECT_GT(s, 1e9);
  std::vector<double> prev(3, 0.0);
  for (double snr : {0.0, 10.0, 20.0, 30.0}) {
    AlignmentSolution<Complex> scaled;
    const auto rep = evaluate(ch, sol, PowerConfig::from_snr_db(snr), {}, &scaled);
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(rep.sinr[i], prev[i]);
      prev[i] = rep.sinr[i];
    }
  }
}

TEST(Sinr, UnverifiedSolutionIsRejected) {
  const auto ch = channels::sample_float(3, 1, Mode::out_of_band, false, 2);
  auto sol = random_solution(ch, 2);
  sol.coding[2](0, 0) *= 1.5;
  sol = schemes::complete_solution(ch, SchemeSpec::three_phase(), sol.coding);
  EXPECT_THROW(effective_sinr(ch, sol, {}), InvalidArgument);
  EXPECT_THROW(apply_power_constraints(ch, sol, {}), InvalidArgument);
  EXPECT_THROW(effective_sinr(ch, random_solution(ch, 3), {0.0, 1.0}), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Power constraints

TEST(Power, RandomInstancesMeetTheCapWithOneTightNode) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ch = channels::sample_float(3, 1, Mode::out_of_band, false, seed);
    const auto sol = random_solution(ch, seed);
    const PowerConfig power{5.0, 0.2};
    const auto ps = apply_power_constraints(ch, sol, power);
    EXPECT_TRUE(schemes::verify_alignment(ch, ps.solution).ok);
    const auto pw = direct_powers(ch, ps.solution, ps.P_sym, power.noise);
    double m2 = 0, m3 = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_LE(pw.phase1[j], power.P + 1e-9);
      EXPECT_LE(pw.phase2[j], power.P + 1e-9);
      EXPECT_LE(pw.phase3[j], power.P + 1e-9);
      m2 = std::max(m2, pw.phase2[j]);
      m3 = std::max(m3, pw.phase3[j]);
      EXPECT_NEAR(pw.phase2[j], ps.powers.phase2[j], 1e-9 * power.P);
      EXPECT_NEAR(pw.phase3[j], ps.powers.phase3[j], 1e-9 * power.P);
    }
    EXPECT_NEAR(m2, power.P, 1e-6);
    EXPECT_NEAR(m3, power.P, 1e-6);
  }
}

TEST(Power, TightSolutionIsUnchanged) {
  const auto ch = channels::sample_float(3, 1, Mode::out_of_band, false, 4);
  const PowerConfig power{3.0, 1.0};
  const auto once = apply_power_constraints(ch, random_solution(ch, 4), power);
  const auto twice = apply_power_constraints(ch, once.solution, power);
  EXPECT_NEAR(twice.d1_scale, 1.0, 1e-12);
  EXPECT_NEAR(twice.d23_scale, 1.0, 1e-12);
}

TEST(Power, AlignmentPreservingScalingsGiveTheSameOutput) {
  const auto ch = channels::sample_float(4, 1, Mode::out_of_band, false, 6);
  const auto sol = random_solution(ch, 6);
  const PowerConfig power{100.0, 1.0};
  const auto base = evaluate(ch, sol, power);
  const Complex c(2.0, 0.0);
  // (D2, D3) -> c (D2, D3)
  auto a = sol.coding;
  a[1] = c * a[1];
  a[2] = c * a[2];
  // (D1, D3) -> (c D1, D3 / c)
  auto b = sol.coding;
  b[0] = c * b[0];
  b[2] = (1.0 / c) * b[2];
  for (const auto& coding : {a, b}) {
    const auto s = schemes::complete_solution(ch, SchemeSpec::three_phase(), coding);
    const auto r = evaluate(ch, s, power);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.sinr[i], base.sinr[i], 1e-9 * base.sinr[i]);
  }
}

// ---------------------------------------------------------------------------
// Accounting and baseline

TEST(Accounting, DivisorIsForwardSlots) {
  EXPECT_EQ(rate_divisor(SchemeSpec::three_phase(), {}), 2);
  EXPECT_EQ(rate_divisor(SchemeSpec::three_phase(), {true, false}), 3);
  EXPECT_EQ(rate_divisor(SchemeSpec::two_reverse(), {true, false}), 4);
  const auto ch = channels::sample_float(3, 1, Mode::out_of_band, false, 1);
  const auto r = evaluate(ch, random_solution(ch, 1), {10.0, 1.0});
  EXPECT_EQ(r.divisor, 2);
  double sum = 0;
  for (double s : r.sinr) sum += std::log2(1 + s);
  EXPECT_NEAR(r.sum_rate, sum / 2, 1e-12);
}

TEST(TimeSharing, ByHand) {
  FloatChannel one;
  one.K = 1;
  one.H = CM(1, 1, Complex(0.6, 0.8));
  EXPECT_NEAR(time_sharing_rate(one, {3.0, 1.0}), 2.0, 1e-12);  // log2(1 + 3)
  auto [ch, sol] = all_ones(4);
  EXPECT_EQ(time_sharing_rate(ch, {1e3, 1.0}), 0.0);
  const auto g = channels::sample_float(3, 1, Mode::out_of_band, false, 1);
  EXPECT_GT(time_sharing_rate(g, {10.0, 1.0}, true), time_sharing_rate(g, {10.0, 1.0}));
}

// ---------------------------------------------------------------------------
// Family and optimizer

TEST(Family, PointsVerifyForThreeAndFourUsers) {
  for (int K : {3, 4}) {
    const auto ch = channels::sample_float(K, 1, Mode::out_of_band, K == 4, 12);
    SolutionFamily fam(ch);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t) {
      auto pt = fam.random_point(rng);
      ASSERT_TRUE(pt.has_value());
      EXPECT_TRUE(schemes::verify_alignment(ch, fam.solution(*pt)).ok);
    }
  }
  const auto five = channels::sample_float(5, 1, Mode::out_of_band, false, 1);
  EXPECT_THROW(SolutionFamily{five}, Unsupported);
  const auto ib = channels::sample_float(3, 1, Mode::in_band, false, 1);
  EXPECT_THROW(optimize_sum_rate(ib, {}), Unsupported);
}

TEST(Optimizer, ZeroIterationsReturnsTheSeedPoint) {
  const auto ch = channels::sample_float(3, 1, Mode::out_of_band, false, 21);
  OptimizerOptions opt;
  opt.restarts = 1;
  opt.iterations = 0;
  opt.seed = 4;
  const auto r = optimize_sum_rate(ch, {100.0, 1.0}, opt);
  EXPECT_DOUBLE_EQ(r.report.sum_rate, r.seed_rate);
  EXPECT_TRUE(r.trace.empty());
}

TEST(Optimizer, MonotoneTraceAndNoWorseThanSeed) {
  const auto ch = channels::sample_float(4, 1, Mode::out_of_band, false, 22);
  OptimizerOptions opt;
  opt.restarts = 2;
  opt.iterations = 60;
  opt.seed = 9;
  const auto r = optimize_sum_rate(ch, {1000.0, 1.0}, opt);
  ASSERT_EQ(r.trace.size(), 120U);
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_GE(r.trace[k], r.trace[k - 1]);
  EXPECT_GE(r.report.sum_rate, r.seed_rate);
  EXPECT_NEAR(r.report.sum_rate, r.trace.back(), 1e-9);
  EXPECT_TRUE(schemes::verify_alignment(ch, r.solution).ok);
  // Same seed, same answer.
  const auto again = optimize_sum_rate(ch, {1000.0, 1.0}, opt);
  EXPECT_EQ(again.report.sum_rate, r.report.sum_rate);
}

// ---------------------------------------------------------------------------
// Curves

TEST(Curves, GridParsing) {
  EXPECT_EQ(parse_snr_grid("0:5:40").size(), 9U);
  EXPECT_EQ(parse_snr_grid("30,40"), (std::vector<double>{30, 40}));
  EXPECT_EQ(parse_snr_grid("-10:2.5:-5"), (std::vector<double>{-10, -7.5, -5}));
  EXPECT_THROW(parse_snr_grid("0:0:10"), ParseError);
  EXPECT_THROW(parse_snr_grid("a,b"), ParseError);
  EXPECT_THROW(parse_snr_grid("1:2"), ParseError);
}

TEST(Curves, DeterministicCsvAndSlopes) {
  CurveOptions opt;
  opt.K = 3;
  opt.snr_db = {30, 40};
  opt.trials = 2;
  opt.seed = 5;
  opt.restarts = 2;
  opt.iterations = 50;
  const auto a = to_csv(monte_carlo_curves(opt).rows);
  opt.jobs = 2;
  const auto b = to_csv(monte_carlo_curves(opt).rows);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("snr_db,ia_sum_rate,ts_sum_rate,trials\n", 0), 0U);
  std::vector<CurveRow> rows{{30, 10, 5, 1}, {40, 10 + 1.5 * 10 / (10 * std::log10(2.0)), 6, 1}};
  EXPECT_NEAR(dof_slope(rows, 30, 40, true), 1.5, 1e-12);
  opt.K = 5;
  EXPECT_THROW(monte_carlo_curves(opt), Unsupported);
}

}  // namespace
