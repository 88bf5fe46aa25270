#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iia/algebra/gaussian_rational.hpp"
#include "iia/algebra/matrix.hpp"
#include "iia/algebra/prime_field.hpp"
#include "iia/errors.hpp"
#include "json.hpp"

namespace iia::channels {

using algebra::GaussianRational;
using algebra::Matrix;
using algebra::PrimeFieldContext;
using algebra::PrimeFieldElement;
using Complex = std::complex<double>;

enum class Mode { out_of_band, in_band };

inline std::string to_string(Mode m) {
  return m == Mode::out_of_band ? "oob" : "ib";
}

/// Zero and one for each scalar type a channel can carry.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<GaussianRational> {
  using Context = algebra::GaussianRationalContext;
  static GaussianRational zero(const Context&) { return 0; }
  static GaussianRational one(const Context&) { return 1; }
};

template <>
struct ScalarTraits<PrimeFieldElement> {
  using Context = PrimeFieldContext;
  static PrimeFieldElement zero(const Context& c) { return c.zero(); }
  static PrimeFieldElement one(const Context& c) { return c.one(); }
};

template <>
struct ScalarTraits<Complex> {
  struct Context {};
  static Complex zero(const Context&) { return 0.0; }
  static Complex one(const Context&) { return 1.0; }
};

/// K-user interference channel with M antennas per node. Matrices are
/// KM x KM; block (i, j) maps source j to destination i.
///
/// Out-of-band: H forward, G reverse (destinations to sources).
/// In-band: H forward (reused transposed for the reverse direction),
/// U source-to-source, W destination-to-destination.
template <class S>
struct ChannelInstance {
  int K = 0;
  int M = 1;
  Mode mode = Mode::out_of_band;
  bool reciprocal = false;
  Matrix<S> H;
  std::optional<Matrix<S>> G;
  std::optional<Matrix<S>> U;
  std::optional<Matrix<S>> W;

  std::size_t dim() const { return static_cast<std::size_t>(K * M); }

  /// Throws InvalidArgument when shapes or mode fields disagree.
  void validate() const {
    if (K < 2 || M < 1) throw InvalidArgument("need K >= 2 and M >= 1");
    auto check = [this](const Matrix<S>& m, const char* name) {
      if (m.rows() != dim() || m.cols() != dim()) {
        throw InvalidArgument(std::string(name) + " must be KM x KM");
      }
    };
    check(H, "H");
    if (mode == Mode::out_of_band) {
      if (!G || U || W) throw InvalidArgument("out-of-band needs H, G only");
      check(*G, "G");
      if (reciprocal && *G != H.transpose()) {
        throw InvalidArgument("reciprocal channel needs G = H^T");
      }
    } else {
      if (G || !U || !W) throw InvalidArgument("in-band needs H, U, W only");
      check(*U, "U");
      check(*W, "W");
    }
  }

  /// Reverse channel used by the schemes: G out-of-band, H^T in-band.
  Matrix<S> reverse() const {
    return mode == Mode::out_of_band ? *G : H.transpose();
  }
};

using ExactChannel = ChannelInstance<GaussianRational>;
using ModularChannel = ChannelInstance<PrimeFieldElement>;
using FloatChannel = ChannelInstance<Complex>;

namespace detail {

template <class S, class Draw>
ChannelInstance<S> sample_with(int K, int M, Mode mode, bool reciprocal,
                               Draw&& draw) {
  if (K < 2 || M < 1) throw InvalidArgument("need K >= 2 and M >= 1");
  if (mode == Mode::in_band && reciprocal) {
    throw InvalidArgument("in-band channels have no separate reverse matrix");
  }
  const auto n = static_cast<std::size_t>(K * M);
  auto matrix = [&] {
    Matrix<S> m(n, n, draw());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != 0 || j != 0) m(i, j) = draw();
      }
    }
    return m;
  };
  ChannelInstance<S> ch;
  ch.K = K;
  ch.M = M;
  ch.mode = mode;
  ch.reciprocal = reciprocal;
  ch.H = matrix();
  if (mode == Mode::out_of_band) {
    ch.G = reciprocal ? ch.H.transpose() : matrix();
  } else {
    ch.U = matrix();
    ch.W = matrix();
  }
  return ch;
}

}  // namespace detail

/// Numerators uniform on [-100, 100] without 0, denominators on [1, 100],
/// drawn independently for real and imaginary parts. No entry is zero.
inline ExactChannel sample_exact(int K, int M, Mode mode, bool reciprocal,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(1, 200);
  std::uniform_int_distribution<int> den(1, 100);
  auto part = [&] {
    int n = num(rng) - 101;
    if (n >= 0) ++n;  // map 0..99 to 1..100
    return mpq_class(n, den(rng));
  };
  return detail::sample_with<GaussianRational>(K, M, mode, reciprocal, [&] {
    mpq_class re = part();
    mpq_class im = part();
    return GaussianRational(re, im);
  });
}

/// Entries uniform on the nonzero residues of F_p.
inline ModularChannel sample_modular(int K, int M, Mode mode, bool reciprocal,
                                     std::uint64_t seed,
                                     const PrimeFieldContext& ctx) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> dist(1, ctx.modulus() - 1);
  return detail::sample_with<PrimeFieldElement>(
      K, M, mode, reciprocal,
      [&] { return PrimeFieldElement(dist(rng), ctx.modulus()); });
}

/// Standard circularly-symmetric complex Gaussian entries, E|h|^2 = 1.
inline FloatChannel sample_float(int K, int M, Mode mode, bool reciprocal,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  return detail::sample_with<Complex>(K, M, mode, reciprocal, [&] {
    double re = gauss(rng);
    double im = gauss(rng);
    return Complex(re, im);
  });
}

/// Apply `f` entrywise to every matrix of the channel.
template <class T, class S, class Fn>
ChannelInstance<T> map_channel(const ChannelInstance<S>& ch, Fn&& f) {
  auto map = [&](const Matrix<S>& m) {
    Matrix<T> out(m.rows(), m.cols(), f(m(0, 0)));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = f(m(i, j));
    }
    return out;
  };
  ChannelInstance<T> out;
  out.K = ch.K;
  out.M = ch.M;
  out.mode = ch.mode;
  out.reciprocal = ch.reciprocal;
  out.H = map(ch.H);
  if (ch.G) out.G = map(*ch.G);
  if (ch.U) out.U = map(*ch.U);
  if (ch.W) out.W = map(*ch.W);
  return out;
}

/// Reduce an exact channel modulo p (through i -> sqrt(-1) mod p).
inline ModularChannel to_modular(const ExactChannel& ch,
                                 const PrimeFieldContext& ctx) {
  return map_channel<PrimeFieldElement>(
      ch, [&](const GaussianRational& q) { return ctx.map(q); });
}

inline FloatChannel to_float(const ExactChannel& ch) {
  return map_channel<Complex>(ch, [](const GaussianRational& q) {
    return Complex(q.real_double(), q.imag_double());
  });
}

// ---------------------------------------------------------------------------
// Structured families

/// H = D + u v^T with D diagonal. Carries the defining data so that the
/// closed-form construction can use it.
struct RankOnePlusDiagonal {
  std::vector<GaussianRational> d;
  std::vector<GaussianRational> u;
  std::vector<GaussianRational> v;
};

/// Throws InvalidArgument unless D is invertible and u, v have no zero
/// component.
inline void check_hypotheses(const RankOnePlusDiagonal& f) {
  if (f.d.size() < 2 || f.u.size() != f.d.size() ||
      f.v.size() != f.d.size()) {
    throw InvalidArgument("D, u, v must share a length K >= 2");
  }
  for (std::size_t i = 0; i < f.d.size(); ++i) {
    if (f.d[i].is_zero()) throw InvalidArgument("D is singular");
    if (f.u[i].is_zero() || f.v[i].is_zero()) {
      throw InvalidArgument("u and v must have nonzero components");
    }
  }
}

inline ExactChannel reciprocal_exact(Matrix<GaussianRational> H) {
  ExactChannel ch;
  ch.K = static_cast<int>(H.rows());
  ch.M = 1;
  ch.mode = Mode::out_of_band;
  ch.reciprocal = true;
  ch.G = H.transpose();
  ch.H = std::move(H);
  return ch;
}

inline ExactChannel build_rank_one_plus_diagonal(const RankOnePlusDiagonal& f) {
  check_hypotheses(f);
  const std::size_t K = f.d.size();
  Matrix<GaussianRational> H(K, K, 0);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      H(i, j) = f.u[i] * f.v[j];
      if (i == j) H(i, j) += f.d[i];
    }
  }
  return reciprocal_exact(std::move(H));
}

/// The all-ones matrix with a zero diagonal, as D = -I, u = v = 1.
inline RankOnePlusDiagonal all_ones_family(int K) {
  if (K < 2) throw InvalidArgument("need K >= 2");
  const auto n = static_cast<std::size_t>(K);
  return {std::vector<GaussianRational>(n, -1),
          std::vector<GaussianRational>(n, 1),
          std::vector<GaussianRational>(n, 1)};
}

inline ExactChannel build_all_ones(int K) {
  return build_rank_one_plus_diagonal(all_ones_family(K));
}

/// Random rank-one-plus-diagonal data with the sampling range of
/// sample_exact.
inline RankOnePlusDiagonal sample_rank_one_plus_diagonal(int K,
                                                         std::uint64_t seed) {
  auto ch = sample_exact(K, 1, Mode::out_of_band, false, seed);
  RankOnePlusDiagonal f;
  for (int i = 0; i < K; ++i) {
    f.d.push_back(ch.H(i, i));
    f.u.push_back((*ch.G)(i, 0));
    f.v.push_back((*ch.G)(i, 1));
  }
  return f;
}

/// 4-user symmetric matrix with zero diagonal and upper triangle h1..h6
/// filled row by row.
inline ExactChannel build_symmetric_zero_diagonal(
    const std::vector<GaussianRational>& h) {
  if (h.size() != 6) throw InvalidArgument("need exactly h1..h6");
  Matrix<GaussianRational> H(4, 4, 0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      H(i, j) = h[k];
      H(j, i) = h[k];
      ++k;
    }
  }
  return reciprocal_exact(std::move(H));
}

/// h1..h6 drawn with the sampling range of sample_exact.
inline ExactChannel sample_symmetric_zero_diagonal_exact(std::uint64_t seed) {
  auto ch = sample_exact(2, 3, Mode::out_of_band, false, seed);
  std::vector<GaussianRational> h;
  for (std::size_t j = 0; j < 6; ++j) h.push_back(ch.H(0, j));
  return build_symmetric_zero_diagonal(h);
}

/// Same family over F_p with uniformly random nonzero h1..h6.
inline ModularChannel sample_symmetric_zero_diagonal(
    std::uint64_t seed, const PrimeFieldContext& ctx) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> dist(1, ctx.modulus() - 1);
  Matrix<PrimeFieldElement> H(4, 4, ctx.zero());
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      H(i, j) = PrimeFieldElement(dist(rng), ctx.modulus());
      H(j, i) = H(i, j);
    }
  }
  ModularChannel ch;
  ch.K = 4;
  ch.mode = Mode::out_of_band;
  ch.reciprocal = true;
  ch.G = H.transpose();
  ch.H = std::move(H);
  return ch;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json integer_json(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

inline mpz_class integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return mpz_class(j.get<long>());
  if (j.is_string()) return mpz_class(j.get<std::string>());
  throw ParseError("expected an integer");
}

inline nlohmann::json scalar_json(const GaussianRational& q) {
  return {{"re", {integer_json(q.real().get_num()),
                  integer_json(q.real().get_den())}},
          {"im", {integer_json(q.imag().get_num()),
                  integer_json(q.imag().get_den())}}};
}

inline nlohmann::json scalar_json(const Complex& c) {
  return {{"re", c.real()}, {"im", c.imag()}};
}

inline GaussianRational exact_from_json(const nlohmann::json& j) {
  auto part = [&](const char* key) {
    const auto& p = j.at(key);
    if (!p.is_array() || p.size() != 2) {
      throw ParseError(std::string("exact scalar '") + key +
                       "' must be [num, den]");
    }
    mpz_class den = integer_from_json(p[1]);
    if (den == 0) throw ParseError("zero denominator");
    return mpq_class(integer_from_json(p[0]), den);
  };
  return {part("re"), part("im")};
}

inline Complex float_from_json(const nlohmann::json& j) {
  return {j.at("re").get<double>(), j.at("im").get<double>()};
}

template <class S>
nlohmann::json matrix_json(const Matrix<S>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class S, class Parse>
Matrix<S> matrix_from_json(const nlohmann::json& j, Parse&& parse) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ParseError("matrix must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix<S> m(rows, cols, parse(j[0][0]));
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ParseError("ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = parse(j[i][k]);
  }
  return m;
}

template <class S>
nlohmann::json channel_json(const ChannelInstance<S>& ch, const char* scalar) {
  nlohmann::json j = {{"K", ch.K},
                      {"M", ch.M},
                      {"mode", to_string(ch.mode)},
                      {"reciprocal", ch.reciprocal},
                      {"scalar", scalar},
                      {"H", matrix_json(ch.H)}};
  if (ch.G) j["G"] = matrix_json(*ch.G);
  if (ch.U) j["U"] = matrix_json(*ch.U);
  if (ch.W) j["W"] = matrix_json(*ch.W);
  return j;
}

template <class S, class Parse>
ChannelInstance<S> channel_from_json(const nlohmann::json& j, Parse&& parse) {
  ChannelInstance<S> ch;
  try {
    ch.K = j.at("K").get<int>();
    ch.M = j.value("M", 1);
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "oob") {
      ch.mode = Mode::out_of_band;
    } else if (mode == "ib") {
      ch.mode = Mode::in_band;
    } else {
      throw ParseError("mode must be \"oob\" or \"ib\"");
    }
    ch.reciprocal = j.value("reciprocal", false);
    ch.H = matrix_from_json<S>(j.at("H"), parse);
    if (j.contains("G")) ch.G = matrix_from_json<S>(j["G"], parse);
    if (j.contains("U")) ch.U = matrix_from_json<S>(j["U"], parse);
    if (j.contains("W")) ch.W = matrix_from_json<S>(j["W"], parse);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("channel JSON: ") + e.what());
  }
  try {
    ch.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("channel JSON: ") + e.what());
  }
  return ch;
}

}  // namespace detail

inline nlohmann::json to_json(const ExactChannel& ch) {
  return detail::channel_json(ch, "exact");
}
inline nlohmann::json to_json(const FloatChannel& ch) {
  return detail::channel_json(ch, "float");
}

inline ExactChannel exact_channel_from_json(const nlohmann::json& j) {
  if (j.value("scalar", "exact") != "exact") {
    throw ParseError("expected an exact channel");
  }
  return detail::channel_from_json<GaussianRational>(
      j, [](const nlohmann::json& s) { return detail::exact_from_json(s); });
}

inline FloatChannel float_channel_from_json(const nlohmann::json& j) {
  if (j.value("scalar", "float") != "float") {
    return to_float(exact_channel_from_json(j));
  }
  return detail::channel_from_json<Complex>(
      j, [](const nlohmann::json& s) { return detail::float_from_json(s); });
}

}  // namespace iia::channels
