#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "iia/algebra/gaussian_rational.hpp"
#include "iia/algebra/prime_field.hpp"
#include "iia/channels.hpp"
#include "iia/schemes/scheme.hpp"
#include "json.hpp"

namespace iia::schemes {

using channels::Complex;

/// Numeric coding matrices with everything a destination needs to decode.
///
/// Receive antenna r observes y_r (phase 1) and y'_r (last phase). With
/// lambda_r = B_rp / H_rp for the pivot column p, the combination
/// y'_r - lambda_r y_r cancels all aligned interference and leaves
/// sum_c (B_rc - lambda_r H_rc) x_c over the destination's own streams.
/// `combining[i]` is that M x M matrix for destination i (for M = 1 the
/// single desired-signal coefficient B_ii - lambda_i H_ii).
template <class S>
struct AlignmentSolution {
  SchemeSpec spec;
  std::vector<Matrix<S>> coding;  // D_1, D_2, ...
  Matrix<S> B;
  std::vector<S> lambda;
  std::vector<Matrix<S>> combining;
};

/// Fill in B, lambda and the combining matrices from the coding matrices.
/// Throws NonGenericInstance if a pivot entry of H is zero.
template <class S>
AlignmentSolution<S> complete_solution(const ChannelInstance<S>& ch,
                                       const SchemeSpec& spec,
                                       std::vector<Matrix<S>> coding) {
  spec.check_channel(ch);
  AlignmentSolution<S> sol;
  sol.spec = spec;
  sol.B = effective_matrix(spec, matrices(ch), coding);
  sol.coding = std::move(coding);
  const int K = ch.K;
  const int M = ch.M;
  const std::size_t n = ch.dim();
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t p = interfering_columns(r, K, M).front();
    if (ch.H(r, p) == ch.H(r, p) - ch.H(r, p)) {
      throw NonGenericInstance("zero pivot entry in H");
    }
    sol.lambda.push_back(sol.B(r, p) / ch.H(r, p));
  }
  for (int i = 0; i < K; ++i) {
    Matrix<S> C(M, M, sol.B(0, 0));
    for (int a = 0; a < M; ++a) {
      const std::size_t r = i * M + a;
      for (int b = 0; b < M; ++b) {
        const std::size_t c = i * M + b;
        C(a, b) = sol.B(r, c) - sol.lambda[r] * ch.H(r, c);
      }
    }
    sol.combining.push_back(std::move(C));
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Verification

struct ConstraintCheck {
  std::string kind;  // "equality", "inequality", "structure", "effective"
  int destination = 0;
  std::string where;
  bool pass = false;
};

struct VerificationReport {
  bool ok = true;
  std::vector<ConstraintCheck> checks;
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.pass ? 0 : 1;
    return n;
  }
};

/// Relative tolerance for float verification.
inline constexpr double kFloatTolerance = 1e-9;

namespace detail {

inline bool vanishes(const algebra::GaussianRational& x, double) {
  return x.is_zero();
}
inline bool vanishes(const algebra::PrimeFieldElement& x, double) {
  return x.is_zero();
}
inline bool vanishes(const Complex& x, double scale) {
  return std::abs(x) <= kFloatTolerance * scale;
}

inline double magnitude(const algebra::GaussianRational&) { return 0.0; }
inline double magnitude(const algebra::PrimeFieldElement&) { return 0.0; }
inline double magnitude(const Complex& x) { return std::abs(x); }

}  // namespace detail

/// Check every cross-multiplied alignment equality (all interfering column
/// pairs, not only those against the pivot) and every desired-signal
/// inequality. Exact scalars are compared exactly; floats with relative
/// tolerance kFloatTolerance.
template <class S>
VerificationReport verify_alignment(const ChannelInstance<S>& ch,
                                    const AlignmentSolution<S>& sol) {
  VerificationReport rep;
  auto add = [&](std::string kind, int dest, std::string where, bool pass) {
    rep.checks.push_back({std::move(kind), dest, std::move(where), pass});
    rep.ok = rep.ok && pass;
  };
  const int K = ch.K;
  const int M = ch.M;
  const auto& spec = sol.spec;
  spec.check_channel(ch);
  bool structure_ok =
      sol.coding.size() == static_cast<std::size_t>(spec.num_coding_matrices());
  if (structure_ok) {
    try {
      for (const auto& D : sol.coding) {
        check_block_diagonal(D, M, [](const S& x) {
          return detail::vanishes(x, 0.0);
        });
      }
    } catch (const InvalidArgument&) {
      structure_ok = false;
    }
  }
  add("structure", 0, "coding matrices block diagonal", structure_ok);
  if (!structure_ok) return rep;

  const Matrix<S> B = effective_matrix(spec, matrices(ch), sol.coding);
  bool same_b = true;
  for (std::size_t i = 0; i < B.rows(); ++i) {
    for (std::size_t j = 0; j < B.cols(); ++j) {
      const S diff = B(i, j) - sol.B(i, j);
      same_b = same_b &&
               detail::vanishes(diff, detail::magnitude(B(i, j)) + 1.0);
    }
  }
  add("effective", 0, "stored B matches coding matrices", same_b);

  const auto& H = ch.H;
  for (std::size_t r = 0; r < B.rows(); ++r) {
    const auto cols = interfering_columns(r, K, M);
    for (std::size_t a = 0; a < cols.size(); ++a) {
      for (std::size_t b = a + 1; b < cols.size(); ++b) {
        const std::size_t c1 = cols[a], c2 = cols[b];
        const S lhs = B(r, c1) * H(r, c2);
        const S rhs = B(r, c2) * H(r, c1);
        const double scale = detail::magnitude(lhs) + detail::magnitude(rhs);
        add("equality", static_cast<int>(r / M) + 1,
            "row " + std::to_string(r + 1) + " cols " +
                std::to_string(c1 + 1) + "," + std::to_string(c2 + 1),
            detail::vanishes(lhs - rhs, scale));
      }
    }
  }

  // Desired signal: determinant of the cleared combining matrix, with a
  // Hadamard-style scale for the float test.
  const auto forms = desired_signal_forms(B, H, K, M);
  for (int i = 0; i < K; ++i) {
    double scale = 1.0;
    for (int a = 0; a < M; ++a) {
      const std::size_t r = i * M + a;
      const std::size_t p = interfering_columns(r, K, M).front();
      double row = 0.0;
      for (int b = 0; b < M; ++b) {
        const std::size_t c = i * M + b;
        row += detail::magnitude(B(r, c) * H(r, p)) +
               detail::magnitude(B(r, p) * H(r, c));
      }
      scale *= row;
    }
    add("inequality", i + 1, "desired signal of destination " +
                                 std::to_string(i + 1),
        !detail::vanishes(forms[i], scale));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

template <class S>
nlohmann::json to_json(const AlignmentSolution<S>& sol,
                       const VerificationReport* report = nullptr) {
  using channels::detail::matrix_json;
  using channels::detail::scalar_json;
  nlohmann::json j;
  j["scheme"] = sol.spec.name();
  j["M"] = sol.spec.M;
  nlohmann::json coding = nlohmann::json::object();
  for (std::size_t k = 0; k < sol.coding.size(); ++k) {
    coding["D" + std::to_string(k + 1)] = matrix_json(sol.coding[k]);
  }
  j["coding"] = std::move(coding);
  j["B"] = matrix_json(sol.B);
  nlohmann::json lambda = nlohmann::json::array();
  for (const auto& l : sol.lambda) lambda.push_back(scalar_json(l));
  j["lambda"] = std::move(lambda);
  nlohmann::json comb = nlohmann::json::array();
  for (const auto& c : sol.combining) comb.push_back(matrix_json(c));
  j["combining"] = std::move(comb);
  if (report != nullptr) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report->checks) {
      checks.push_back({{"kind", c.kind},
                        {"destination", c.destination},
                        {"where", c.where},
                        {"pass", c.pass}});
    }
    j["verification"] = {{"ok", report->ok},
                         {"failures", report->failures()},
                         {"checks", std::move(checks)}};
  }
  return j;
}

}  // namespace iia::schemes
