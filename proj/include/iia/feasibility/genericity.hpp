#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "iia/channels.hpp"
#include "iia/feasibility/decide.hpp"
#include "iia/feasibility/slice.hpp"
#include "iia/schemes/system.hpp"
#include "json.hpp"

namespace iia::feasibility {

using algebra::BuchbergerBudget;
using algebra::GaussianRational;
using algebra::PrimeFieldContext;
using algebra::PrimeFieldElement;
using channels::ExactChannel;
using channels::Mode;
using schemes::SchemeKind;
using schemes::SchemeSpec;

enum class SystemKind { alignment, neutralization };
enum class Backend { automatic, prime_field, gaussian_rational };
enum class Family { generic, symmetric_zero_diagonal };

inline std::string to_string(Backend b) {
  switch (b) {
    case Backend::automatic:
      return "auto";
    case Backend::prime_field:
      return "fp";
    case Backend::gaussian_rational:
      return "qi";
  }
  return "?";
}

inline Backend parse_backend(const std::string& s) {
  if (s == "auto") return Backend::automatic;
  if (s == "fp") return Backend::prime_field;
  if (s == "qi") return Backend::gaussian_rational;
  throw InvalidArgument("unknown backend '" + s + "' (auto, fp, qi)");
}

struct GenericityRequest {
  SchemeSpec spec = SchemeSpec::three_phase();
  SystemKind system = SystemKind::alignment;
  Family family = Family::generic;
  int K = 3;
  bool reciprocal = true;
  std::size_t trials = 5;
  Backend backend = Backend::automatic;
  BuchbergerBudget budget;
  std::uint64_t seed = 0;
  /// Try a gauge-fixed slice before the full system.
  bool slicing = true;
  std::size_t jobs = 1;
  /// Decide this channel instead of sampling (each trial then draws only a
  /// fresh prime).
  std::optional<ExactChannel> channel;
};

struct TrialResult {
  std::size_t index = 0;
  std::uint64_t channel_seed = 0;
  std::uint32_t prime = 0;  // 0 for Q(i)
  Verdict verdict;
  /// The verdict came from a sliced system.
  bool sliced = false;
  std::size_t variables = 0;
  std::size_t equalities = 0;
  std::size_t inequalities = 0;
};

enum class Consensus { feasible, infeasible, no_consensus, anomaly };

inline std::string to_string(Consensus c) {
  switch (c) {
    case Consensus::feasible:
      return "feasible";
    case Consensus::infeasible:
      return "infeasible";
    case Consensus::no_consensus:
      return "no-consensus";
    case Consensus::anomaly:
      return "anomaly";
  }
  return "?";
}

struct GenericityReport {
  GenericityRequest request;
  std::vector<TrialResult> trials;
  Consensus consensus = Consensus::no_consensus;
  /// Completed trials disagreeing with the majority outcome.
  std::size_t dissent = 0;
  std::size_t exhausted = 0;
};

/// Backend that `automatic` resolves to: Q(i) for three users, F_p above.
inline Backend resolve_backend(const GenericityRequest& r) {
  if (r.backend != Backend::automatic) return r.backend;
  return r.K <= 3 ? Backend::gaussian_rational : Backend::prime_field;
}

/// Fixed coordinates for the sliced attempt, keyed by variable name. Values
/// of 0 and 1 pin scaling and shift symmetries of the scheme; "random"
/// entries get a random nonzero field element. Empty when no slice is used.
inline std::vector<std::pair<std::string, std::optional<int>>> default_slice(
    const SchemeSpec& spec, SystemKind system, int K) {
  if (system != SystemKind::alignment || spec.M != 1) return {};
  switch (spec.kind) {
    case SchemeKind::three_phase:
      return {{"d1_1", 1}, {"d2_1", 1}, {"d3_1", 0}};
    case SchemeKind::two_reverse: {
      std::vector<std::pair<std::string, std::optional<int>>> s{
          {"d1_1", 1}, {"d2_1", 1}, {"d3_1", 0}, {"d4_1", 1}};
      for (int i = 2; i <= K; ++i) {
        s.emplace_back("d1_" + std::to_string(i), std::nullopt);
      }
      for (int i = 2; i <= std::min(K, 3); ++i) {
        s.emplace_back("d2_" + std::to_string(i), std::nullopt);
      }
      return s;
    }
    case SchemeKind::in_band:
      return {};
  }
  return {};
}

namespace detail {

template <algebra::ExactScalar F>
schemes::AlignmentSystem<F> build_system(const channels::ChannelInstance<F>& ch,
                                         const GenericityRequest& r,
                                         const typename F::Context& ctx) {
  if (r.system == SystemKind::neutralization) {
    return schemes::build_neutralization_system(ch, ctx);
  }
  return schemes::build_alignment_system(ch, r.spec, ctx);
}

inline GaussianRational random_nonzero(const GaussianRational::Context&,
                                       std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 100);
  return GaussianRational(mpq_class(d(rng)), mpq_class(0));
}

inline PrimeFieldElement random_nonzero(const PrimeFieldContext& ctx,
                                        std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> d(1, ctx.modulus() - 1);
  return PrimeFieldElement(d(rng), ctx.modulus());
}

/// Sliced attempt (if configured) then the full system with what remains of
/// the wall-clock budget. A feasible slice is conclusive; anything else
/// falls through.
template <algebra::ExactScalar F>
void decide_trial(const schemes::AlignmentSystem<F>& sys,
                  const GenericityRequest& r, std::uint64_t slice_seed,
                  TrialResult& out) {
  out.variables = sys.num_variables();
  out.equalities = sys.num_equalities();
  out.inequalities = sys.num_inequalities();
  const auto start = std::chrono::steady_clock::now();
  algebra::BuchbergerOptions opts;
  opts.budget = r.budget;
  const auto slice_spec =
      r.slicing ? default_slice(r.spec, r.system, r.K)
                : std::vector<std::pair<std::string, std::optional<int>>>{};
  if (!slice_spec.empty()) {
    std::mt19937_64 rng(slice_seed);
    const auto& ctx = sys.ring->context();
    std::map<std::size_t, F> fixed;
    for (const auto& [name, value] : slice_spec) {
      fixed[sys.ring->index_of(name)] =
          value ? ctx.from_int(*value) : random_nonzero(ctx, rng);
    }
    auto sliced_opts = opts;
    sliced_opts.budget.max_wall = r.budget.max_wall / 4;
    auto v = decide(rabinowitsch_separate(slice(sys, fixed)), sliced_opts);
    if (v.outcome == Outcome::feasible) {
      out.verdict = v;
      out.sliced = true;
      return;
    }
  }
  const auto used = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  opts.budget.max_wall =
      std::max(std::chrono::milliseconds(0), r.budget.max_wall - used);
  out.verdict = decide(rabinowitsch_separate(sys), opts);
}

/// In-band channels have no separate reverse matrix to make reciprocal.
inline bool reciprocal(const GenericityRequest& r) {
  return r.reciprocal && r.spec.mode() == Mode::out_of_band;
}

inline ExactChannel sample_exact_channel(const GenericityRequest& r,
                                         std::uint64_t seed) {
  if (r.family == Family::symmetric_zero_diagonal) {
    return channels::sample_symmetric_zero_diagonal_exact(seed);
  }
  return channels::sample_exact(r.K, r.spec.M, r.spec.mode(), reciprocal(r),
                                seed);
}

inline channels::ModularChannel sample_modular_channel(
    const GenericityRequest& r, std::uint64_t seed,
    const PrimeFieldContext& ctx) {
  if (r.family == Family::symmetric_zero_diagonal) {
    return channels::sample_symmetric_zero_diagonal(seed, ctx);
  }
  return channels::sample_modular(r.K, r.spec.M, r.spec.mode(), reciprocal(r),
                                  seed, ctx);
}

inline void run_trial(const GenericityRequest& r, Backend backend,
                      std::uint64_t prime_seed, std::uint64_t slice_seed,
                      TrialResult& out) {
  if (backend == Backend::gaussian_rational) {
    const GaussianRational::Context ctx;
    auto ch = r.channel ? *r.channel : sample_exact_channel(r, out.channel_seed);
    decide_trial(build_system(ch, r, ctx), r, slice_seed, out);
    return;
  }
  std::mt19937_64 rng(prime_seed);
  const auto ctx = PrimeFieldContext::random_31bit(rng);
  out.prime = ctx.modulus();
  auto ch = r.channel ? channels::to_modular(*r.channel, ctx)
                      : sample_modular_channel(r, out.channel_seed, ctx);
  decide_trial(build_system(ch, r, ctx), r, slice_seed, out);
}

}  // namespace detail

/// Consensus over the completed trials: unanimous outcome, anomaly on any
/// disagreement, no-consensus when every trial ran out of budget.
inline void summarize(GenericityReport& rep) {
  std::size_t feasible = 0, infeasible = 0;
  rep.exhausted = 0;
  for (const auto& t : rep.trials) {
    switch (t.verdict.outcome) {
      case Outcome::feasible:
        ++feasible;
        break;
      case Outcome::infeasible:
        ++infeasible;
        break;
      case Outcome::budget_exhausted:
        ++rep.exhausted;
        break;
    }
  }
  rep.dissent = std::min(feasible, infeasible);
  if (feasible == 0 && infeasible == 0) {
    rep.consensus = Consensus::no_consensus;
  } else if (feasible > 0 && infeasible > 0) {
    rep.consensus = Consensus::anomaly;
  } else {
    rep.consensus = feasible > 0 ? Consensus::feasible : Consensus::infeasible;
  }
}

/// Monte Carlo genericity protocol: decide `trials` independent instances
/// and report whether they agree. Deterministic per seed as long as no
/// trial hits the wall-clock budget.
inline GenericityReport generic_feasibility(const GenericityRequest& request) {
  if (request.trials == 0) throw InvalidArgument("trials must be >= 1");
  if (request.family == Family::symmetric_zero_diagonal &&
      (request.K != 4 || request.spec.kind != SchemeKind::three_phase ||
       request.spec.M != 1)) {
    throw InvalidArgument("the symmetric zero-diagonal family is 4-user "
                          "three-phase");
  }
  if (request.system == SystemKind::neutralization &&
      request.spec.kind != SchemeKind::three_phase) {
    throw InvalidArgument("neutralization is defined for the three-phase "
                          "scheme");
  }
  if (request.channel) {
    request.spec.check_channel(*request.channel);
    if (request.channel->K != request.K) {
      throw InvalidArgument("channel file has K = " +
                            std::to_string(request.channel->K));
    }
  }
  GenericityReport rep;
  rep.request = request;
  const Backend backend = resolve_backend(request);
  rep.request.backend = backend;
  std::mt19937_64 master(request.seed);
  std::vector<std::uint64_t> prime_seeds, slice_seeds;
  rep.trials.resize(request.trials);
  for (std::size_t t = 0; t < request.trials; ++t) {
    rep.trials[t].index = t;
    rep.trials[t].channel_seed = master();
    prime_seeds.push_back(master());
    slice_seeds.push_back(master());
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < request.trials; t = next++) {
      detail::run_trial(request, backend, prime_seeds[t], slice_seeds[t],
                        rep.trials[t]);
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(request.jobs, 1,
                                                   request.trials);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  summarize(rep);
  return rep;
}

/// JSON form of the report. Timings are left out so that reruns with the
/// same seed produce identical bytes.
inline nlohmann::json to_json(const GenericityReport& rep) {
  const auto& r = rep.request;
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : rep.trials) {
    nlohmann::json j{{"trial", t.index},
                     {"outcome", to_string(t.verdict.outcome)},
                     {"backend", t.verdict.backend},
                     {"sliced", t.sliced},
                     {"variables", t.variables},
                     {"equalities", t.equalities},
                     {"inequalities", t.inequalities},
                     {"reductions", t.verdict.stats.reductions},
                     {"basis_size", t.verdict.stats.basis_size}};
    if (!r.channel) j["channel_seed"] = t.channel_seed;
    trials.push_back(std::move(j));
  }
  return {{"scheme", r.spec.name()},
          {"system", r.system == SystemKind::alignment ? "alignment"
                                                       : "neutralization"},
          {"family", r.family == Family::generic ? "generic"
                                                 : "symmetric-zero-diagonal"},
          {"K", r.K},
          {"M", r.spec.M},
          {"reciprocal", r.reciprocal},
          {"backend", to_string(r.backend)},
          {"seed", r.seed},
          {"consensus", to_string(rep.consensus)},
          {"dissent", rep.dissent},
          {"budget_exhausted", rep.exhausted},
          {"trials", std::move(trials)}};
}

}  // namespace iia::feasibility
