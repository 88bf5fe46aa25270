#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "iia/algebra/matrix.hpp"
#include "iia/channels.hpp"
#include "iia/errors.hpp"

namespace iia::schemes {

using algebra::Matrix;
using channels::ChannelInstance;
using channels::Mode;

enum class SchemeKind {
  three_phase,  // out-of-band, one reverse slot: B = H D2 + H D3 G D1 H
  two_reverse,  // out-of-band, two reverse slots:
                // B = H D3 + H D4 G D1 H + H D5 G D2 H
  in_band,      // full duplex, two phases: B = H D1 + H D2 U + W D3 H
};

struct SchemeSpec {
  SchemeKind kind = SchemeKind::three_phase;
  int M = 1;

  static SchemeSpec three_phase() { return {SchemeKind::three_phase, 1}; }
  static SchemeSpec two_reverse() { return {SchemeKind::two_reverse, 1}; }
  static SchemeSpec in_band(int M = 1) { return {SchemeKind::in_band, M}; }

  std::string name() const {
    switch (kind) {
      case SchemeKind::three_phase:
        return "three-phase";
      case SchemeKind::two_reverse:
        return "two-reverse";
      case SchemeKind::in_band:
        return M == 1 ? "in-band" : "in-band-mimo";
    }
    return "?";
  }

  Mode mode() const {
    return kind == SchemeKind::in_band ? Mode::in_band : Mode::out_of_band;
  }
  int num_coding_matrices() const {
    return kind == SchemeKind::two_reverse ? 5 : 3;
  }
  /// Forward-channel slots, the divisor of the rate accounting.
  int forward_slots() const { return 2; }
  /// Reverse slots on the separate feedback band (zero for full duplex).
  int reverse_slots() const {
    switch (kind) {
      case SchemeKind::three_phase:
        return 1;
      case SchemeKind::two_reverse:
        return 2;
      case SchemeKind::in_band:
        return 0;
    }
    return 0;
  }
  /// Unknowns in the coding matrices for K users.
  int num_variables(int K) const { return num_coding_matrices() * K * M * M; }

  template <class S>
  void check_channel(const ChannelInstance<S>& ch) const {
    if (ch.mode != mode()) {
      throw InvalidArgument(name() + " scheme needs a " +
                            channels::to_string(mode()) + " channel");
    }
    if (ch.M != M) throw InvalidArgument("antenna count differs from scheme");
  }
};

inline SchemeKind parse_scheme_kind(const std::string& s) {
  if (s == "three-phase") return SchemeKind::three_phase;
  if (s == "two-reverse") return SchemeKind::two_reverse;
  if (s == "in-band" || s == "in-band-mimo") return SchemeKind::in_band;
  throw InvalidArgument("unknown scheme '" + s + "'");
}

/// Channel matrices lifted into the value type T of a computation.
template <class T>
struct ChannelMatrices {
  Matrix<T> H;
  Matrix<T> R;  // G out-of-band, unused in-band
  Matrix<T> U;
  Matrix<T> W;
};

template <class T, class S, class Lift>
ChannelMatrices<T> lift(const ChannelInstance<S>& ch, Lift&& f) {
  auto map = [&](const Matrix<S>& m) {
    Matrix<T> out(m.rows(), m.cols(), f(m(0, 0)));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = f(m(i, j));
    }
    return out;
  };
  ChannelMatrices<T> out;
  out.H = map(ch.H);
  if (ch.G) out.R = map(*ch.G);
  if (ch.U) out.U = map(*ch.U);
  if (ch.W) out.W = map(*ch.W);
  return out;
}

template <class S>
ChannelMatrices<S> matrices(const ChannelInstance<S>& ch) {
  return lift<S>(ch, [](const S& s) { return s; });
}

/// End-to-end matrix of the scheme for coding matrices `D` (D[0] is D_1).
template <class T>
Matrix<T> effective_matrix(const SchemeSpec& spec, const ChannelMatrices<T>& c,
                           const std::vector<Matrix<T>>& D) {
  if (D.size() != static_cast<std::size_t>(spec.num_coding_matrices())) {
    throw InvalidArgument(spec.name() + " needs " +
                          std::to_string(spec.num_coding_matrices()) +
                          " coding matrices");
  }
  const auto& H = c.H;
  switch (spec.kind) {
    case SchemeKind::three_phase: {
      Matrix<T> GD1H = c.R * (D[0] * H);
      return H * D[1] + H * (D[2] * GD1H);
    }
    case SchemeKind::two_reverse: {
      Matrix<T> GD1H = c.R * (D[0] * H);
      Matrix<T> GD2H = c.R * (D[1] * H);
      return H * D[2] + H * (D[3] * GD1H) + H * (D[4] * GD2H);
    }
    case SchemeKind::in_band:
      return H * D[0] + H * (D[1] * c.U) + c.W * (D[2] * H);
  }
  throw InvalidArgument("unknown scheme");
}

/// Throws InvalidArgument if `D` has a nonzero entry outside its M x M
/// diagonal blocks.
template <class T, class IsZero>
void check_block_diagonal(const Matrix<T>& D, int M, IsZero&& is_zero) {
  for (std::size_t i = 0; i < D.rows(); ++i) {
    for (std::size_t j = 0; j < D.cols(); ++j) {
      if (i / M != j / M && !is_zero(D(i, j))) {
        throw InvalidArgument("coding matrix entry (" + std::to_string(i) +
                              "," + std::to_string(j) +
                              ") breaks the block-diagonal structure");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Alignment constraints, written for any value type with + - *.

/// Receive antenna r belongs to destination r / M; its interfering columns
/// are those of the other sources, and the first of them is the pivot.
inline std::vector<std::size_t> interfering_columns(std::size_t r, int K,
                                                    int M) {
  std::vector<std::size_t> cols;
  const std::size_t dest = r / M;
  for (std::size_t c = 0; c < static_cast<std::size_t>(K * M); ++c) {
    if (c / M != dest) cols.push_back(c);
  }
  return cols;
}

/// B_rc H_rp - B_rp H_rc for every receive antenna r and interfering column
/// c other than the pivot p: K M ((K-1) M - 1) polynomials.
template <class T>
std::vector<T> alignment_equations(const Matrix<T>& B, const Matrix<T>& H,
                                   int K, int M) {
  std::vector<T> eqs;
  for (std::size_t r = 0; r < B.rows(); ++r) {
    auto cols = interfering_columns(r, K, M);
    const std::size_t p = cols.front();
    for (std::size_t k = 1; k < cols.size(); ++k) {
      const std::size_t c = cols[k];
      eqs.push_back(B(r, c) * H(r, p) - B(r, p) * H(r, c));
    }
  }
  return eqs;
}

/// Witness column for the desired-signal inequality of destination i when
/// M = 1: j = (i mod K) + 1 in 1-based labels.
inline std::size_t witness(std::size_t i, int K) { return (i + 1) % K; }

/// Determinant by cofactor expansion; fine for the M <= 3 blocks used here.
template <class T>
T cofactor_determinant(const Matrix<T>& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  T det = m(0, 0) - m(0, 0);
  for (std::size_t c = 0; c < n; ++c) {
    Matrix<T> minor(n - 1, n - 1, m(0, 0));
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t jj = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != c) minor(i - 1, jj++) = m(i, j);
      }
    }
    T term = m(0, c) * cofactor_determinant(minor);
    if (c % 2 == 0) {
      det += term;
    } else {
      det -= term;
    }
  }
  return det;
}

/// Desired-signal inequality of each destination, cleared of denominators.
/// M = 1: B_ii H_ij - B_ij H_ii with the witness j. M > 1: determinant of
/// the M x M matrix with rows B_rc H_rp - B_rp H_rc (c over the
/// destination's own source columns, p the pivot of antenna r).
template <class T>
std::vector<T> desired_signal_forms(const Matrix<T>& B, const Matrix<T>& H,
                                    int K, int M) {
  std::vector<T> out;
  if (M == 1) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(K); ++i) {
      const std::size_t j = witness(i, K);
      out.push_back(B(i, i) * H(i, j) - B(i, j) * H(i, i));
    }
    return out;
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(K); ++i) {
    Matrix<T> C(M, M, B(0, 0));
    for (int a = 0; a < M; ++a) {
      const std::size_t r = i * M + a;
      const std::size_t p = interfering_columns(r, K, M).front();
      for (int b = 0; b < M; ++b) {
        const std::size_t c = i * M + b;
        C(a, b) = B(r, c) * H(r, p) - B(r, p) * H(r, c);
      }
    }
    out.push_back(cofactor_determinant(C));
  }
  return out;
}

}  // namespace iia::schemes
