// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [criterion...]   run only the listed criteria (1-9)

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "iia/algebra.hpp"
#include "iia/feasibility/genericity.hpp"
#include "iia/ratesim.hpp"
#include "iia/schemes/solvers.hpp"
#include "iia/schemes/system.hpp"
#include "oracles.hpp"
#include "support.hpp"

#ifndef IIA_CLI
#error "IIA_CLI must name the built CLI"
#endif

namespace {

using namespace iia;
using algebra::GaussianRational;
using algebra::Matrix;
using algebra::MonomialOrder;
using algebra::Polynomial;
using algebra::PolynomialRing;
using algebra::PrimeFieldContext;
using algebra::PrimeFieldElement;
using channels::Mode;
using schemes::SchemeSpec;
using Q = GaussianRational;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int prec = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << x;
  return s.str();
}

Matrix<Q> three_phase_B(const Matrix<Q>& H, const Matrix<Q>& G,
                        const std::vector<Matrix<Q>>& D) {
  return H * D[1] + H * D[2] * G * D[0] * H;
}

// 1. Closed form on random rank-1-plus-diagonal channels.
Outcome closed_form() {
  const auto t0 = Clock::now();
  int ok = 0, total = 0, skipped = 0;
  for (int K : {3, 5, 8}) {
    std::uint64_t seed = 1000 * K;
    for (int n = 0; n < 100; ++seed) {
      const auto f = channels::sample_rank_one_plus_diagonal(K, seed);
      schemes::ClosedForm cf;
      try {
        cf = schemes::solve_rank1_closed_form(f);
      } catch (const DegenerateChannel&) {
        ++skipped;  // alpha = 1
        continue;
      }
      ++n;
      ++total;
      const auto ch = channels::build_rank_one_plus_diagonal(f);
      Matrix<Q> want(K, K, 0);
      for (int i = 0; i < K; ++i) want(i, i) = (Q(1) - cf.alpha) * f.d[i];
      ok += three_phase_B(ch.H, *ch.G, cf.coding) == want;
    }
  }
  const double s = seconds_since(t0);
  return {ok == total && s < 10.0,
          std::to_string(ok) + "/" + std::to_string(total) + " exact, " +
              std::to_string(skipped) + " alpha=1 draws skipped, " + fmt(s) + " s"};
}

// 2. All-ones worked examples.
Outcome all_ones() {
  bool pass = true;
  std::string bad;
  for (int K = 3; K <= 8; ++K) {
    Matrix<Q> H(K, K, 1);
    for (int i = 0; i < K; ++i) H(i, i) = 0;
    const auto cf = schemes::solve_rank1_closed_form(channels::all_ones_family(K));
    const auto I = Matrix<Q>::identity(K, 0, 1);
    const bool b = three_phase_B(H, H.transpose(), cf.coding) == Q((K - 1) * (K - 2)) * I;
    const bool c = cf.coding[1] == Q(-(K * K - 3 * K + 3)) * I;
    if (!b || !c) {
      pass = false;
      bad += " K=" + std::to_string(K);
    }
  }
  return {pass, pass ? "K=3..8: B = (K-1)(K-2) I, phase-3 coefficient -(K^2-3K+3)"
                     : "mismatch at" + bad};
}

// 3. Three-user linear construction.
Outcome three_user() {
  const auto t0 = Clock::now();
  int ok[2] = {0, 0};
  for (int r = 0; r < 2; ++r) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto ch = channels::sample_exact(3, 1, Mode::out_of_band, r == 0, 7000 + seed);
      const auto res = schemes::solve_3user_linear(ch, seed);
      ok[r] += res.diagnostics.nullspace_dim == 3 &&
               res.diagnostics.bad_subspace_dims == std::vector<std::size_t>{2, 2, 2} &&
               schemes::verify_alignment(ch, res.solution).ok;
    }
  }
  const double s = seconds_since(t0);
  return {ok[0] == 100 && ok[1] == 100 && s < 30.0,
          "reciprocal " + std::to_string(ok[0]) + "/100, independent " +
              std::to_string(ok[1]) + "/100, " + fmt(s) + " s"};
}

// 4. Groebner engine properties.
template <class F>
bool division_holds(const Polynomial<F>& f, const std::vector<Polynomial<F>>& gs) {
  const auto res = algebra::divide(f, gs);
  auto sum = res.remainder;
  for (std::size_t i = 0; i < gs.size(); ++i) sum += res.quotients[i] * gs[i];
  if (!(sum == f)) return false;
  for (const auto& t : res.remainder.terms()) {
    for (const auto& g : gs) {
      if (g.leading_monomial().divides(t.monomial)) return false;
    }
  }
  return true;
}

template <class F>
bool spolys_reduce(const std::vector<Polynomial<F>>& gens) {
  algebra::BuchbergerOptions opt;
  opt.stop_on_unit = false;
  const auto gb = algebra::buchberger(gens, opt);
  if (!gb.is_complete()) return false;
  const auto& G = gb.polynomials();
  for (std::size_t i = 0; i < G.size(); ++i) {
    for (std::size_t j = i + 1; j < G.size(); ++j) {
      if (!algebra::normal_form(algebra::s_polynomial(G[i], G[j]), G).is_zero()) {
        return false;
      }
    }
  }
  for (const auto& g : gens) {
    if (!algebra::ideal_membership(g, gb)) return false;
  }
  return true;
}

template <class F>
bool instance_holds(const algebra::RingPtr<F>& ring, std::mt19937_64& rng, int gens,
                    unsigned deg) {
  using testing::random_nonzero_poly;
  const auto f = testing::random_poly(ring, rng, 8, 5);
  std::vector<Polynomial<F>> gs;
  for (int k = 0; k < gens; ++k) gs.push_back(random_nonzero_poly(ring, rng, 4, deg));
  return division_holds(f, gs) && spolys_reduce(gs);
}

Outcome groebner() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  int fp = 0, qi = 0, agree = 0, units = 0;
  for (int t = 0; t < 500; ++t) {
    const auto ctx = PrimeFieldContext::random_31bit(rng);
    auto ring = PolynomialRing<PrimeFieldElement>::make(
        testing::var_names(2 + t % 2), ctx,
        t % 2 ? MonomialOrder::lex : MonomialOrder::grevlex);
    fp += instance_holds(ring, rng, 3, 3);
  }
  for (int t = 0; t < 100; ++t) {
    auto ring = PolynomialRing<Q>::make(testing::var_names(2), {},
                                        t % 2 ? MonomialOrder::lex : MonomialOrder::grevlex);
    qi += instance_holds(ring, rng, 2, 2);
  }
  for (int t = 0; t < 100; ++t) {
    const auto ctx = PrimeFieldContext::random_31bit(rng);
    auto ring = PolynomialRing<PrimeFieldElement>::make(testing::var_names(3), ctx);
    std::vector<Polynomial<PrimeFieldElement>> gens;
    for (int k = 0; k < 2 + t % 3; ++k) {
      gens.push_back(testing::random_nonzero_poly(ring, rng, 3, 2));
    }
    const auto a = algebra::buchberger(gens, MonomialOrder::lex);
    const auto b = algebra::buchberger(gens, MonomialOrder::grevlex);
    const bool ua = algebra::contains_unit(a);
    agree += a.is_complete() && b.is_complete() && ua == algebra::contains_unit(b);
    units += ua;
  }
  const double s = seconds_since(t0);
  return {fp == 500 && qi == 100 && agree == 100 && s < 120.0,
          "F_p " + std::to_string(fp) + "/500, Q(i) " + std::to_string(qi) +
              "/100, lex/grevlex " + std::to_string(agree) + "/100 (" +
              std::to_string(units) + " unit ideals), " + fmt(s) + " s"};
}

// 5. Rabinowitsch reduction against brute force over F_5.
bool has_point(const schemes::AlignmentSystem<PrimeFieldElement>& sys) {
  const auto& ctx = sys.ring->context();
  const std::size_t n = sys.ring->num_vars();
  std::vector<PrimeFieldElement> pt(n, ctx.zero());
  std::function<bool(std::size_t)> rec = [&](std::size_t k) {
    if (k == n) {
      for (const auto& f : sys.equalities) {
        if (!f.evaluate(pt).is_zero()) return false;
      }
      for (const auto& g : sys.inequalities) {
        if (g.evaluate(pt).is_zero()) return false;
      }
      return true;
    }
    for (std::uint32_t v = 0; v < ctx.modulus(); ++v) {
      pt[k] = PrimeFieldElement(v, ctx.modulus());
      if (rec(k + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

Outcome rabinowitsch() {
  const PrimeFieldContext ctx(5);
  std::mt19937_64 rng(55);
  int ok = 0, solvable = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 3;
    auto ring = PolynomialRing<PrimeFieldElement>::make(testing::var_names(n), ctx);
    schemes::AlignmentSystem<PrimeFieldElement> sys{ring, {}, {}};
    for (int k = 0; k < 1 + t % 2; ++k) {
      sys.equalities.push_back(testing::random_poly(ring, rng, 3, 2, 2));
    }
    for (int k = 0; k < 1 + (t % 3 == 0); ++k) {
      sys.inequalities.push_back(testing::random_nonzero_poly(ring, rng, 2, 1));
    }
    const bool orig = has_point(sys);
    solvable += orig;
    ok += has_point(feasibility::rabinowitsch(sys)) == orig &&
          has_point(feasibility::rabinowitsch_separate(sys)) == orig;
  }
  return {ok == 200, std::to_string(ok) + "/200 agree (" + std::to_string(solvable) +
                         " solvable), single and per-inequality forms"};
}

// 6. Engine verdicts on the known feasibility results.
Outcome claims() {
  using feasibility::Backend;
  using feasibility::Consensus;
  struct Claim {
    std::string name;
    feasibility::GenericityRequest req;
    Consensus want;
    bool exhaustion_ok = false;
  };
  const auto make = [](SchemeSpec spec, int K, bool reciprocal, std::uint64_t seed) {
    feasibility::GenericityRequest r;
    r.spec = spec;
    r.K = K;
    r.reciprocal = reciprocal;
    r.trials = 5;
    r.seed = seed;
    r.backend = Backend::prime_field;
    r.budget.max_wall = std::chrono::minutes(10);
    r.jobs = std::max(1U, std::thread::hardware_concurrency());
    return r;
  };
  std::vector<Claim> cs;
  cs.push_back({"K=3 neutralization (F_p)", make(SchemeSpec::three_phase(), 3, true, 31),
                Consensus::infeasible});
  cs.back().req.system = feasibility::SystemKind::neutralization;
  cs.push_back(cs.back());
  cs.back().name = "K=3 neutralization (Q(i))";
  cs.back().req.backend = Backend::gaussian_rational;
  cs.push_back({"K=4 reciprocal", make(SchemeSpec::three_phase(), 4, true, 41),
                Consensus::feasible});
  cs.push_back({"K=4 independent", make(SchemeSpec::three_phase(), 4, false, 42),
                Consensus::feasible});
  cs.push_back({"K=5 single-reverse", make(SchemeSpec::three_phase(), 5, true, 51),
                Consensus::infeasible});
  cs.push_back({"K=6 single-reverse", make(SchemeSpec::three_phase(), 6, true, 61),
                Consensus::infeasible});
  cs.push_back({"K=5 two-reverse", make(SchemeSpec::two_reverse(), 5, true, 52),
                Consensus::feasible});
  cs.push_back({"symmetric zero-diagonal K=4", make(SchemeSpec::three_phase(), 4, true, 43),
                Consensus::feasible});
  cs.back().req.family = feasibility::Family::symmetric_zero_diagonal;
  cs.push_back({"K=6 two-reverse", make(SchemeSpec::two_reverse(), 6, true, 62),
                Consensus::feasible, true});

  bool pass = true;
  std::string detail;
  for (const auto& c : cs) {
    const auto t0 = Clock::now();
    const auto rep = feasibility::generic_feasibility(c.req);
    const double s = seconds_since(t0);
    bool ok = rep.consensus == c.want && rep.dissent == 0;
    if (c.exhaustion_ok) {
      // Any unanimous verdict is reported as-is; exhaustion is reported as such.
      ok = rep.consensus != Consensus::anomaly;
    }
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += c.name + ": " + feasibility::to_string(rep.consensus);
    if (rep.exhausted > 0) detail += " (" + std::to_string(rep.exhausted) + "/5 budget-exhausted)";
    detail += " " + fmt(s, 1) + " s";
    std::cerr << "  [6] " << c.name << ": " << feasibility::to_string(rep.consensus)
              << ", exhausted " << rep.exhausted << ", " << fmt(s, 1) << " s\n";
  }
  return {pass, detail};
}

// 7. In-band and MIMO constructions.
Outcome in_band() {
  const auto det = [](Matrix<Q> m) { return algebra::determinant(std::move(m), Q(0), Q(1)); };
  int single[2] = {0, 0}, trivial = 0, mimo[3] = {0, 0, 0};
  for (int K : {3, 4}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto ch = channels::sample_exact(K, 1, Mode::in_band, false, 8000 + seed);
      const auto res = schemes::solve_inband_linear(ch, seed);
      single[K - 3] += schemes::verify_alignment(ch, res.solution).ok;
    }
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ch = channels::sample_exact(5, 1, Mode::in_band, false, 8500 + seed);
    const auto d = schemes::diagnose_in_band(ch);
    trivial += d.only_trivial && !d.admits_solution;
  }
  const auto t0 = Clock::now();
  for (int M = 1; M <= 3; ++M) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto ch = channels::sample_exact(4, M, Mode::in_band, false, 9000 + 100 * M + seed);
      const auto res = schemes::solve_mimo(ch, seed);
      bool ok = schemes::verify_alignment(ch, res.solution).ok &&
                res.solution.combining.size() == 4;
      for (const auto& C : res.solution.combining) ok = ok && !det(C).is_zero();
      mimo[M - 1] += ok;
    }
  }
  const bool pass = single[0] == 100 && single[1] == 100 && trivial == 100 &&
                    mimo[0] == 25 && mimo[1] == 25 && mimo[2] == 25;
  return {pass, "K=3 " + std::to_string(single[0]) + "/100, K=4 " +
                    std::to_string(single[1]) + "/100, K=5 trivial " +
                    std::to_string(trivial) + "/100, MIMO M=1,2,3 " +
                    std::to_string(mimo[0]) + "," + std::to_string(mimo[1]) + "," +
                    std::to_string(mimo[2]) + "/25 (" + fmt(seconds_since(t0), 1) + " s)"};
}

// 8. Finite-SNR curves.
Outcome finite_snr() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  const double lo = 30.0, hi = 40.0;
  for (int K : {3, 4}) {
    ratesim::CurveOptions opt;
    opt.K = K;
    opt.snr_db = ratesim::parse_snr_grid("0:5:40");
    opt.trials = 50;
    opt.seed = 2020 + K;
    opt.jobs = std::max(1U, std::thread::hardware_concurrency());
    const auto curves = ratesim::monte_carlo_curves(opt);
    bool above = true;
    for (const auto& r : curves.rows) {
      if (r.snr_db >= lo && r.ia_sum_rate <= r.ts_sum_rate) above = false;
    }
    const double ia = ratesim::dof_slope(curves.rows, lo, hi, true);
    const double ts = ratesim::dof_slope(curves.rows, lo, hi, false);
    const double ia_lo = K == 3 ? 1.25 : 1.7, ia_hi = K == 3 ? 1.65 : 2.15;
    const bool ok = above && ia >= ia_lo && ia <= ia_hi && ts >= 0.9 && ts <= 1.1;
    pass = pass && ok;
    detail += "K=" + std::to_string(K) + " IA slope " + fmt(ia, 3) + " [" + fmt(ia_lo) + "," +
              fmt(ia_hi) + "], TS slope " + fmt(ts, 3) + ", IA>TS at >=30 dB " +
              (above ? "yes" : "no") + "; ";
    std::cerr << "  [8] K=" << K << " curves done at " << fmt(seconds_since(t0), 1) << " s\n";
    std::cerr << ratesim::to_csv(curves.rows);
  }

  // Spot checks of the analytic noise against the sampling oracle.
  int spot = 0;
  for (int n = 0; n < 20; ++n) {
    const int K = 3 + n % 2;
    const auto ch = channels::sample_float(K, 1, Mode::out_of_band, false, 600 + n);
    ratesim::SolutionFamily fam(ch);
    std::mt19937_64 rng(n);
    const auto pt = fam.random_point(rng);
    if (!pt) continue;
    const auto power = ratesim::PowerConfig::from_snr_db(5.0 * (n % 9));
    const auto ps = ratesim::apply_power_constraints(ch, fam.solution(*pt), power);
    const auto analytic = ratesim::noise_variances(ch, ps.solution, power.noise);
    const auto mc = testing::sampled_noise(ch, ps.solution, ps.P_sym, power.noise, 200000,
                                           9000 + n);
    bool ok = true;
    for (int i = 0; i < K; ++i) ok = ok && std::abs(analytic[i] - mc.variance[i]) <= 3 * mc.se[i];
    spot += ok;
  }
  const double s = seconds_since(t0);
  pass = pass && spot == 20 && s < 900.0;
  detail += "SINR spot checks " + std::to_string(spot) + "/20, " + fmt(s, 1) + " s";
  return {pass, detail};
}

// 9. CLI determinism.
std::string capture(const std::string& args, int& code) {
  const std::string cmd = std::string(IIA_CLI) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) {
    code = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome determinism() {
  const std::vector<std::string> runs = {
      "feasibility --K 4 --reciprocal --trials 3 --seed 5",
      "feasibility --K 5 --trials 2 --seed 5",
      "feasibility --K 3 --reciprocal --neutralization --trials 3 --seed 5 --backend qi",
      "construct --family all-ones --K 5",
      "construct --family rank-one --K 4 --seed 5",
      "construct --sample --K 3 --seed 5",
      "construct --inband --K 4 --seed 5",
      "construct --inband --K 4 --M 2 --seed 5",
      "channel --K 4 --reciprocal --seed 5",
      "simulate --K 3 --snr 0:10:40 --trials 3 --seed 5 --restarts 2 --iterations 50",
      "simulate --K 4 --snr 20,40 --trials 2 --seed 5 --restarts 2 --iterations 50",
      "plan --K-min 3 --K-max 12",
  };
  int same = 0;
  std::string bad;
  for (const auto& r : runs) {
    int c1 = 0, c2 = 0;
    const auto a = capture(r, c1), b = capture(r, c2);
    if (a == b && c1 == c2 && !a.empty()) {
      ++same;
    } else {
      bad += " [" + r + "]";
    }
  }
  return {same == static_cast<int>(runs.size()),
          std::to_string(same) + "/" + std::to_string(runs.size()) +
              " commands byte-identical across two runs" + bad};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form exactness", closed_form},
      {"worked all-ones examples", all_ones},
      {"3-user alignment", three_user},
      {"Groebner engine properties", groebner},
      {"Rabinowitsch equivalence", rabinowitsch},
      {"feasibility verdicts", claims},
      {"in-band and MIMO schemes", in_band},
      {"finite-SNR curves", finite_snr},
      {"CLI determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[k].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
