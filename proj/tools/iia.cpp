// Command-line front end: feasibility | construct | simulate | plan | channel.
//
// Exit codes: 0 success / consensus feasible, 2 consensus infeasible,
// 3 no consensus, budget exhausted or failed verification, 1 usage error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "iia/channels.hpp"
#include "iia/feasibility/genericity.hpp"
#include "iia/ratesim.hpp"
#include "iia/schemes/solvers.hpp"
#include "json.hpp"

namespace {

using namespace iia;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInconclusive = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

channels::ExactChannel read_exact_channel(const std::string& path) {
  return channels::exact_channel_from_json(read_json(path));
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed,
                           const char* what) {
  if (!seed) {
    throw UsageError(std::string("--seed is required for ") + what);
  }
  return *seed;
}

// ---------------------------------------------------------------------------

struct FeasibilityArgs {
  std::string scheme = "three-phase";
  int K = 3;
  int M = 1;
  bool reciprocal = false;
  bool inband = false;
  bool neutralization = false;
  std::string family = "generic";
  std::size_t trials = 5;
  std::string backend = "auto";
  std::optional<std::uint64_t> seed;
  std::string channel;
  double max_seconds = 600;
  std::size_t max_basis = 200000;
  bool no_slicing = false;
  std::size_t jobs = 1;
  std::string out;
  std::string dump_system;
  bool verbose = false;
};

template <class F>
void dump_system(const FeasibilityArgs& a, const feasibility::GenericityRequest& r,
                 const channels::ChannelInstance<F>& ch,
                 const typename F::Context& ctx) {
  const auto sys = r.system == feasibility::SystemKind::alignment
                       ? schemes::build_alignment_system(ch, r.spec, ctx)
                       : schemes::build_neutralization_system(ch, ctx);
  std::ofstream out(a.dump_system);
  if (!out) throw UsageError("cannot write " + a.dump_system);
  out << schemes::to_text(sys);
}

int cmd_feasibility(const FeasibilityArgs& a) {
  feasibility::GenericityRequest r;
  const auto kind = schemes::parse_scheme_kind(a.inband ? "in-band" : a.scheme);
  r.spec = kind == schemes::SchemeKind::three_phase   ? schemes::SchemeSpec::three_phase()
           : kind == schemes::SchemeKind::two_reverse ? schemes::SchemeSpec::two_reverse()
                                                      : schemes::SchemeSpec::in_band(a.M);
  if (kind != schemes::SchemeKind::in_band && a.M != 1) {
    throw UsageError("--M applies to the in-band scheme only");
  }
  r.system = a.neutralization ? feasibility::SystemKind::neutralization
                              : feasibility::SystemKind::alignment;
  if (a.family == "generic") {
    r.family = feasibility::Family::generic;
  } else if (a.family == "symmetric-zero-diagonal") {
    r.family = feasibility::Family::symmetric_zero_diagonal;
  } else {
    throw UsageError("unknown family '" + a.family + "'");
  }
  r.K = a.K;
  r.reciprocal = a.reciprocal;
  r.trials = a.trials;
  r.backend = feasibility::parse_backend(a.backend);
  r.budget.max_wall = std::chrono::milliseconds(
      static_cast<long long>(a.max_seconds * 1000.0));
  r.budget.max_basis_size = a.max_basis;
  r.slicing = !a.no_slicing;
  r.jobs = a.jobs;
  if (!a.channel.empty()) {
    r.channel = read_exact_channel(a.channel);
    if (r.family != feasibility::Family::generic) {
      throw UsageError("--channel and --family are exclusive");
    }
    r.reciprocal = r.channel->reciprocal;
    r.seed = a.seed.value_or(0);
  } else {
    r.seed = require_seed(a.seed, "sampled feasibility runs");
  }
  if (!a.dump_system.empty()) {
    // The Q(i) system of the file channel, or of one channel drawn from
    // the seed (the same distribution the trials use).
    const auto ch = r.channel ? *r.channel
                              : channels::sample_exact(
                                    r.K, r.spec.M, r.spec.mode(),
                                    r.reciprocal &&
                                        r.spec.mode() == channels::Mode::out_of_band,
                                    r.seed);
    dump_system(a, r, ch, algebra::GaussianRational::Context{});
  }
  const auto rep = feasibility::generic_feasibility(r);
  if (a.verbose) {
    for (const auto& t : rep.trials) {
      std::fprintf(stderr, "trial %zu: %s via %s%s, %.3f s, prime %u\n",
                   t.index, feasibility::to_string(t.verdict.outcome).c_str(),
                   t.verdict.backend.c_str(), t.sliced ? " (slice)" : "",
                   t.verdict.stats.seconds, static_cast<unsigned>(t.prime));
    }
  }
  write_output(feasibility::to_json(rep).dump(2) + "\n", a.out);
  switch (rep.consensus) {
    case feasibility::Consensus::feasible:
      return kExitOk;
    case feasibility::Consensus::infeasible:
      return kExitInfeasible;
    default:
      return kExitInconclusive;
  }
}

// ---------------------------------------------------------------------------

struct ConstructArgs {
  std::string family;
  bool sample = false;
  bool inband = false;
  bool reciprocal = false;
  int K = 3;
  int M = 1;
  int max_M = schemes::kMaxDeskScaleM;
  std::optional<std::uint64_t> seed;
  std::string channel;
  std::string out;
};

json diagnostics_json(const schemes::LinearDiagnostics& d) {
  return {{"unknowns", d.unknowns},
          {"equations", d.equations},
          {"rank", d.rank},
          {"nullspace_dim", d.nullspace_dim},
          {"bad_subspace_dims", d.bad_subspace_dims},
          {"admits_solution", d.admits_solution},
          {"only_trivial", d.only_trivial},
          {"attempts", d.attempts}};
}

int emit_solution(const channels::ExactChannel& ch,
                  const schemes::AlignmentSolution<algebra::GaussianRational>& sol,
                  json extra, const std::string& out) {
  const auto report = schemes::verify_alignment(ch, sol);
  json j = schemes::to_json(sol, &report);
  j["K"] = ch.K;
  j["channel"] = channels::to_json(ch);
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_output(j.dump(2) + "\n", out);
  return report.ok ? kExitOk : kExitInconclusive;
}

int cmd_construct(ConstructArgs a) {
  using algebra::GaussianRational;
  if (a.inband && a.family.empty() && a.channel.empty()) a.sample = true;
  const int sources = (!a.family.empty()) + a.sample + (!a.channel.empty());
  if (sources != 1) {
    throw UsageError("choose exactly one of --family, --sample, --channel");
  }
  if (!a.family.empty()) {
    channels::RankOnePlusDiagonal f;
    if (a.family == "all-ones") {
      f = channels::all_ones_family(a.K);
    } else if (a.family == "rank-one") {
      f = channels::sample_rank_one_plus_diagonal(
          a.K, require_seed(a.seed, "--family rank-one"));
    } else {
      throw UsageError("unknown family '" + a.family + "' (all-ones, rank-one)");
    }
    const auto cf = schemes::solve_rank1_closed_form(f);
    const auto ch = channels::build_rank_one_plus_diagonal(f);
    auto sol = schemes::complete_solution(ch, schemes::SchemeSpec::three_phase(),
                                          cf.coding);
    return emit_solution(ch, sol,
                         {{"construction", "closed-form"},
                          {"alpha", channels::detail::scalar_json(cf.alpha)}},
                         a.out);
  }
  channels::ExactChannel ch;
  std::uint64_t seed = 0;
  if (a.sample) {
    seed = require_seed(a.seed, "--sample");
    const auto mode = a.inband ? channels::Mode::in_band : channels::Mode::out_of_band;
    ch = channels::sample_exact(a.K, a.M, mode, a.reciprocal && !a.inband, seed);
  } else {
    ch = read_exact_channel(a.channel);
    seed = a.seed.value_or(0);
  }
  schemes::LinearSolveResult<GaussianRational> res;
  std::string construction;
  if (ch.mode == channels::Mode::out_of_band) {
    if (ch.M != 1) throw Unsupported("out-of-band construction needs M = 1");
    res = schemes::solve_3user_linear(ch, seed);
    construction = "three-user-linear";
  } else if (ch.M == 1) {
    res = schemes::solve_inband_linear(ch, seed);
    construction = "in-band-linear";
  } else {
    res = schemes::solve_mimo(ch, seed, {}, a.max_M);
    construction = "in-band-mimo";
  }
  json extra{{"construction", construction},
             {"diagnostics", diagnostics_json(res.diagnostics)}};
  if (a.sample) extra["seed"] = seed;
  return emit_solution(ch, res.solution, std::move(extra), a.out);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  int K = 3;
  std::string snr = "0:5:40";
  std::size_t trials = 50;
  std::optional<std::uint64_t> seed;
  std::size_t restarts = 8;
  std::size_t iterations = 400;
  bool reciprocal = false;
  bool charge_feedback = false;
  bool boost = false;
  std::size_t jobs = 1;
  std::string out;
  bool verbose = false;
};

int cmd_simulate(const SimulateArgs& a) {
  ratesim::CurveOptions opt;
  opt.K = a.K;
  opt.reciprocal = a.reciprocal;
  opt.snr_db = ratesim::parse_snr_grid(a.snr);
  opt.trials = a.trials;
  opt.seed = require_seed(a.seed, "simulate");
  opt.restarts = a.restarts;
  opt.iterations = a.iterations;
  opt.accounting.charge_feedback = a.charge_feedback;
  opt.accounting.boosted_time_sharing = a.boost;
  opt.jobs = a.jobs;
  const auto curves = ratesim::monte_carlo_curves(opt);
  if (a.verbose) {
    json trials = json::array();
    for (const auto& t : curves.trials) {
      json pts = json::array();
      for (std::size_t g = 0; g < t.points.size(); ++g) {
        const auto& p = t.points[g];
        pts.push_back({{"snr_db", opt.snr_db[g]},
                       {"sinr", p.sinr},
                       {"sum_rate", p.sum_rate},
                       {"time_sharing", p.time_sharing},
                       {"divisor", p.divisor},
                       {"phase2_power", p.powers.phase2},
                       {"phase3_power", p.powers.phase3}});
      }
      trials.push_back({{"channel_seed", t.channel_seed}, {"points", pts}});
    }
    std::cerr << json{{"K", opt.K}, {"seed", opt.seed}, {"trials", trials}}.dump(2)
              << "\n";
  }
  write_output(ratesim::to_csv(curves.rows), a.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_plan(int k_min, int k_max) {
  if (k_min < 2 || k_max < k_min) throw UsageError("need 2 <= K-min <= K-max");
  std::string out = "K,N,N_v,N_e,dof,conjectural\n";
  char buf[160];
  for (int K = k_min; K <= k_max; ++K) {
    const auto p = schemes::multiphase_plan(K);
    std::snprintf(buf, sizeof buf, "%d,%d,%lld,%lld,%.4f,%s\n", p.K, p.N, p.N_v,
                  p.N_e, p.dof, p.conjectural ? "yes" : "no");
    out += buf;
  }
  std::cout << out;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ChannelArgs {
  int K = 3;
  int M = 1;
  bool inband = false;
  bool reciprocal = false;
  std::string family;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_channel(const ChannelArgs& a) {
  channels::ExactChannel ch;
  if (a.family == "all-ones") {
    ch = channels::build_all_ones(a.K);
  } else if (a.family == "symmetric-zero-diagonal") {
    ch = channels::sample_symmetric_zero_diagonal_exact(
        require_seed(a.seed, "channel sampling"));
  } else if (a.family.empty()) {
    const auto mode = a.inband ? channels::Mode::in_band : channels::Mode::out_of_band;
    ch = channels::sample_exact(a.K, a.M, mode, a.reciprocal && !a.inband,
                                require_seed(a.seed, "channel sampling"));
  } else {
    throw UsageError("unknown family '" + a.family + "'");
  }
  write_output(channels::to_json(ch).dump(2) + "\n", a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive interference alignment: feasibility, constructions "
               "and finite-SNR rates"};
  app.require_subcommand(1);

  FeasibilityArgs fa;
  auto* feas = app.add_subcommand("feasibility", "Monte Carlo generic feasibility");
  feas->add_option("--scheme", fa.scheme, "three-phase | two-reverse | in-band");
  feas->add_option("--K", fa.K, "number of users")->check(CLI::Range(2, 64));
  feas->add_option("--M", fa.M, "antennas per node (in-band)")->check(CLI::Range(1, 16));
  feas->add_flag("--reciprocal", fa.reciprocal, "reverse channel G = H^T");
  feas->add_flag("--inband", fa.inband, "full-duplex two-phase scheme");
  feas->add_flag("--neutralization", fa.neutralization,
                 "decide the neutralization system instead of alignment");
  feas->add_option("--family", fa.family, "generic | symmetric-zero-diagonal");
  feas->add_option("--trials", fa.trials, "random instances")->check(CLI::PositiveNumber);
  feas->add_option("--backend", fa.backend, "auto | fp | qi");
  feas->add_option("--seed", fa.seed, "master seed (required unless --channel)");
  feas->add_option("--channel", fa.channel, "channel JSON file");
  feas->add_option("--max-seconds", fa.max_seconds, "wall budget per trial")
      ->check(CLI::PositiveNumber);
  feas->add_option("--max-basis", fa.max_basis, "basis size cap")->check(CLI::PositiveNumber);
  feas->add_flag("--no-slicing", fa.no_slicing, "skip the coordinate slice");
  feas->add_option("--jobs", fa.jobs, "parallel trials")->check(CLI::PositiveNumber);
  feas->add_option("--out", fa.out, "write JSON here instead of stdout");
  feas->add_option("--dump-system", fa.dump_system, "write the polynomial system");
  feas->add_flag("--verbose", fa.verbose, "per-trial timings on stderr");

  ConstructArgs ca;
  auto* cons = app.add_subcommand("construct", "build and verify a solution");
  cons->add_option("--family", ca.family, "all-ones | rank-one");
  cons->add_flag("--sample", ca.sample, "random exact channel");
  cons->add_flag("--inband", ca.inband,
                 "full-duplex two-phase scheme (samples unless --channel)");
  cons->add_flag("--reciprocal", ca.reciprocal, "reverse channel G = H^T");
  cons->add_option("--K", ca.K, "number of users")->check(CLI::Range(2, 64));
  cons->add_option("--M", ca.M, "antennas per node")->check(CLI::Range(1, 16));
  cons->add_option("--max-M", ca.max_M, "antenna cap for the MIMO solver")
      ->check(CLI::PositiveNumber);
  cons->add_option("--seed", ca.seed, "channel and sampler seed");
  cons->add_option("--channel", ca.channel, "channel JSON file");
  cons->add_option("--out", ca.out, "write JSON here instead of stdout");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "finite-SNR sum-rate curves (CSV)");
  sim->add_option("--K", sa.K, "number of users (3 or 4)");
  sim->add_option("--snr", sa.snr, "grid in dB: start:step:stop or a,b,c");
  sim->add_option("--trials", sa.trials, "channel realizations")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed, "master seed (required)");
  sim->add_option("--restarts", sa.restarts, "optimizer restarts")
      ->check(CLI::PositiveNumber);
  sim->add_option("--iterations", sa.iterations, "iterations per restart");
  sim->add_flag("--reciprocal", sa.reciprocal, "reverse channel G = H^T");
  sim->add_flag("--charge-feedback", sa.charge_feedback,
                "count the reverse slot in the rate divisor");
  sim->add_flag("--boost", sa.boost, "time sharing bursts K P in its slot");
  sim->add_option("--jobs", sa.jobs, "parallel trials")->check(CLI::PositiveNumber);
  sim->add_option("--out", sa.out, "write CSV here instead of stdout");
  sim->add_flag("--verbose", sa.verbose, "per-trial JSON on stderr");

  int k_min = 2, k_max = 16;
  auto* plan = app.add_subcommand("plan", "multi-phase counting table (CSV)");
  plan->add_option("--K-min", k_min, "first K");
  plan->add_option("--K-max", k_max, "last K");

  ChannelArgs cha;
  auto* chan = app.add_subcommand("channel", "write a channel JSON file");
  chan->add_option("--K", cha.K, "number of users")->check(CLI::Range(2, 64));
  chan->add_option("--M", cha.M, "antennas per node")->check(CLI::Range(1, 16));
  chan->add_flag("--inband", cha.inband, "in-band channel (H, U, W)");
  chan->add_flag("--reciprocal", cha.reciprocal, "G = H^T");
  chan->add_option("--family", cha.family, "all-ones | symmetric-zero-diagonal");
  chan->add_option("--seed", cha.seed, "sampling seed");
  chan->add_option("--out", cha.out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*feas) return cmd_feasibility(fa);
    if (*cons) return cmd_construct(ca);
    if (*sim) return cmd_simulate(sa);
    if (*plan) return cmd_plan(k_min, k_max);
    if (*chan) return cmd_channel(cha);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Unsupported& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconclusive;
  }
  return kExitUsage;
}
