#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "iia/algebra/gaussian_rational.hpp"
#include "iia/algebra/matrix.hpp"
#include "iia/algebra/prime_field.hpp"

namespace iia::algebra {

namespace detail {

/// Gaussian integer with just the operations fraction-free elimination uses.
struct GaussInt {
  mpz_class re, im;

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

inline GaussInt mul_sub(const GaussInt& a, const GaussInt& b,
                        const GaussInt& c, const GaussInt& d) {
  // a*b - c*d
  return {a.re * b.re - a.im * b.im - c.re * d.re + c.im * d.im,
          a.re * b.im + a.im * b.re - c.re * d.im - c.im * d.re};
}

/// Divisor with its norm cached.
struct ExactDivisor {
  GaussInt b;
  mpz_class norm;
  bool real = false;

  explicit ExactDivisor(GaussInt v)
      : b(std::move(v)), norm(b.re * b.re + b.im * b.im), real(sgn(b.im) == 0) {}
};

/// a / b where b divides a exactly.
inline GaussInt divexact(const GaussInt& a, const ExactDivisor& d) {
  GaussInt q;
  if (d.real) {
    mpz_divexact(q.re.get_mpz_t(), a.re.get_mpz_t(), d.b.re.get_mpz_t());
    mpz_divexact(q.im.get_mpz_t(), a.im.get_mpz_t(), d.b.re.get_mpz_t());
    return q;
  }
  q.re = a.re * d.b.re + a.im * d.b.im;
  q.im = a.im * d.b.re - a.re * d.b.im;
  mpz_divexact(q.re.get_mpz_t(), q.re.get_mpz_t(), d.norm.get_mpz_t());
  mpz_divexact(q.im.get_mpz_t(), q.im.get_mpz_t(), d.norm.get_mpz_t());
  return q;
}

/// out = (kk * ij - ik * kj) / prev, in place and without temporaries.
inline void bareiss_step(GaussInt& ij, const GaussInt& kk, const GaussInt& ik,
                         const GaussInt& kj, const ExactDivisor& prev,
                         mpz_class& tr, mpz_class& ti) {
  mpz_mul(tr.get_mpz_t(), kk.re.get_mpz_t(), ij.re.get_mpz_t());
  mpz_submul(tr.get_mpz_t(), kk.im.get_mpz_t(), ij.im.get_mpz_t());
  mpz_submul(tr.get_mpz_t(), ik.re.get_mpz_t(), kj.re.get_mpz_t());
  mpz_addmul(tr.get_mpz_t(), ik.im.get_mpz_t(), kj.im.get_mpz_t());
  mpz_mul(ti.get_mpz_t(), kk.re.get_mpz_t(), ij.im.get_mpz_t());
  mpz_addmul(ti.get_mpz_t(), kk.im.get_mpz_t(), ij.re.get_mpz_t());
  mpz_submul(ti.get_mpz_t(), ik.re.get_mpz_t(), kj.im.get_mpz_t());
  mpz_submul(ti.get_mpz_t(), ik.im.get_mpz_t(), kj.re.get_mpz_t());
  if (prev.real) {
    mpz_divexact(ij.re.get_mpz_t(), tr.get_mpz_t(), prev.b.re.get_mpz_t());
    mpz_divexact(ij.im.get_mpz_t(), ti.get_mpz_t(), prev.b.re.get_mpz_t());
    return;
  }
  // (tr + ti i) * conj(prev) / |prev|^2
  mpz_mul(ij.re.get_mpz_t(), tr.get_mpz_t(), prev.b.re.get_mpz_t());
  mpz_addmul(ij.re.get_mpz_t(), ti.get_mpz_t(), prev.b.im.get_mpz_t());
  mpz_mul(ij.im.get_mpz_t(), ti.get_mpz_t(), prev.b.re.get_mpz_t());
  mpz_submul(ij.im.get_mpz_t(), tr.get_mpz_t(), prev.b.im.get_mpz_t());
  mpz_divexact(ij.re.get_mpz_t(), ij.re.get_mpz_t(), prev.norm.get_mpz_t());
  mpz_divexact(ij.im.get_mpz_t(), ij.im.get_mpz_t(), prev.norm.get_mpz_t());
}

/// Rows of [A | b], each multiplied by the lcm of its denominators.
inline std::vector<std::vector<GaussInt>> integral_rows(
    const Matrix<GaussianRational>& A, const std::vector<GaussianRational>& b) {
  const std::size_t m = A.rows(), n = A.cols();
  std::vector<std::vector<GaussInt>> R(m, std::vector<GaussInt>(n + 1));
  for (std::size_t i = 0; i < m; ++i) {
    mpz_class den = 1;
    auto absorb = [&](const GaussianRational& q) {
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.real().get_den_mpz_t());
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.imag().get_den_mpz_t());
    };
    for (std::size_t j = 0; j < n; ++j) absorb(A(i, j));
    absorb(b[i]);
    auto scale = [&](const GaussianRational& q) {
      return GaussInt{q.real().get_num() * (den / q.real().get_den()),
                      q.imag().get_num() * (den / q.imag().get_den())};
    };
    for (std::size_t j = 0; j < n; ++j) R[i][j] = scale(A(i, j));
    R[i][n] = scale(b[i]);
  }
  return R;
}

/// Multiplication modulo a prime below 2^31 with a floating-point quotient
/// estimate instead of a hardware division.
struct MulMod {
  std::uint64_t p;
  double inv;

  explicit MulMod(std::uint64_t prime)
      : p(prime), inv(1.0 / static_cast<double>(prime)) {}

  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const {
    const auto q = static_cast<std::uint64_t>(static_cast<double>(a) *
                                              static_cast<double>(b) * inv);
    auto r = static_cast<std::int64_t>(a * b - q * p);
    if (r < 0) r += static_cast<std::int64_t>(p);
    if (r >= static_cast<std::int64_t>(p)) r -= static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(r);
  }
};

/// Gaussian elimination modulo p on an n x (n+1) augmented system; returns
/// det mod p (0 if singular) and writes det * x, the Cramer numerators,
/// into y.
inline std::uint64_t cramer_mod(std::vector<std::vector<std::uint64_t>> M,
                                std::uint64_t p, std::vector<std::uint64_t>& y) {
  const std::size_t n = M.size();
  const MulMod mul(p);
  std::uint64_t det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && M[piv][k] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      std::swap(M[piv], M[k]);
      det = (p - det) % p;
    }
    det = mul(det, M[k][k]);
    const std::uint64_t inv = pow_mod(M[k][k], p - 2, p);
    auto& rk = M[k];
    for (std::size_t i = k + 1; i < n; ++i) {
      auto& ri = M[i];
      if (ri[k] == 0) continue;
      const std::uint64_t f = p - mul(ri[k], inv);
      for (std::size_t j = k + 1; j <= n; ++j) {
        const std::uint64_t t = ri[j] + mul(f, rk[j]);
        ri[j] = t >= p ? t - p : t;
      }
    }
  }
  std::vector<std::uint64_t> x(n);
  for (std::size_t k = n; k-- > 0;) {
    std::uint64_t acc = M[k][n];
    for (std::size_t j = k + 1; j < n; ++j) {
      acc = (acc + p - mul(M[k][j], x[j])) % p;
    }
    x[k] = mul(acc, pow_mod(M[k][k], p - 2, p));
  }
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = mul(x[i], det);
  return det;
}

inline std::uint64_t residue(const mpz_class& z, std::uint64_t p) {
  return mpz_fdiv_ui(z.get_mpz_t(), p);
}

}  // namespace detail

/// Integer-scaled solution of a square-or-tall linear system: A y = d b
/// with d a nonzero Gaussian integer and y Gaussian integral.
struct ScaledSolution {
  std::vector<GaussianRational> y;
  GaussianRational d;
};

/// Solve A x = b over Q(i) by fraction-free (Bareiss) elimination, for A
/// with full column rank. Rows are first scaled to Gaussian integers, so
/// intermediate entries stay minors of the scaled matrix and no gcds are
/// taken; back substitution is fraction-free as well (Cramer numerators
/// over the last pivot). Returns nullopt if A is rank deficient or the
/// system is inconsistent.
inline std::optional<ScaledSolution> solve_fraction_free_scaled(
    const Matrix<GaussianRational>& A, const std::vector<GaussianRational>& b) {
  using detail::GaussInt;
  const std::size_t m = A.rows(), n = A.cols();
  if (b.size() != m) throw InvalidArgument("right-hand side size mismatch");
  if (n > m || n == 0) return std::nullopt;
  auto R = detail::integral_rows(A, b);
  detail::ExactDivisor prev(GaussInt{1, 0});
  mpz_class tr, ti;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < m && R[p][k].is_zero()) ++p;
    if (p == m) return std::nullopt;
    std::swap(R[p], R[k]);
    for (std::size_t i = k + 1; i < m; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        detail::bareiss_step(R[i][j], R[k][k], R[i][k], R[k][j], prev, tr, ti);
      }
      R[i][k] = GaussInt{};
    }
    prev = detail::ExactDivisor(R[k][k]);
  }
  for (std::size_t i = n; i < m; ++i) {
    if (!R[i][n].is_zero()) return std::nullopt;
  }
  // With d = R[n-1][n-1] (the determinant of the leading block), d x is
  // integral and each back-substitution step divides exactly.
  const GaussInt d = R[n - 1][n - 1];
  std::vector<GaussInt> y(n);
  const GaussInt zero{};
  for (std::size_t k = n; k-- > 0;) {
    GaussInt acc = detail::mul_sub(d, R[k][n], zero, zero);
    for (std::size_t j = k + 1; j < n; ++j) {
      acc = detail::mul_sub({1, 0}, acc, R[k][j], y[j]);
    }
    y[k] = detail::divexact(acc, detail::ExactDivisor(R[k][k]));
  }
  auto to_q = [](const GaussInt& g) {
    return GaussianRational(mpq_class(g.re), mpq_class(g.im));
  };
  ScaledSolution out;
  for (const auto& v : y) out.y.push_back(to_q(v));
  out.d = to_q(d);
  return out;
}


/// Same contract as solve_fraction_free_scaled, computed by Chinese
/// remaindering: pick n independent rows, then solve that square system
/// modulo enough 31-bit primes (both embeddings i -> +-sqrt(-1)) to cover the
/// Hadamard bound on its determinant and Cramer numerators. The result is
/// checked exactly against every row before it is returned.
inline std::optional<ScaledSolution> solve_multimodular_scaled(
    const Matrix<GaussianRational>& A, const std::vector<GaussianRational>& b,
    std::uint64_t seed = 1) {
  using detail::GaussInt;
  const std::size_t m = A.rows(), n = A.cols();
  if (b.size() != m) throw InvalidArgument("right-hand side size mismatch");
  if (n > m || n == 0) return std::nullopt;
  const auto R = detail::integral_rows(A, b);
  std::mt19937_64 rng(seed);

  auto embed = [&](const GaussInt& g, std::uint64_t p, std::uint64_t s) {
    return (detail::residue(g.re, p) + detail::residue(g.im, p) * s) % p;
  };

  // Row selection modulo one prime.
  std::vector<std::size_t> rows;
  {
    const auto ctx = PrimeFieldContext::random_31bit(rng);
    const std::uint64_t p = ctx.modulus();
    const std::uint64_t s = ctx.imaginary_unit().value();
    std::vector<std::vector<std::uint64_t>> M(m, std::vector<std::uint64_t>(n));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) M[i][j] = embed(R[i][j], p, s);
    }
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      while (piv < m && M[piv][k] == 0) ++piv;
      if (piv == m) return std::nullopt;
      std::swap(M[piv], M[k]);
      std::swap(order[piv], order[k]);
      const std::uint64_t inv = detail::pow_mod(M[k][k], p - 2, p);
      for (std::size_t i = k + 1; i < m; ++i) {
        if (M[i][k] == 0) continue;
        const std::uint64_t f = M[i][k] * inv % p;
        for (std::size_t j = k; j < n; ++j) {
          M[i][j] = (M[i][j] + (p - f) * M[k][j]) % p;
        }
      }
    }
    rows.assign(order.begin(), order.begin() + static_cast<long>(n));
  }

  // Hadamard bound (bits) over the rows of the square augmented system.
  std::size_t bound = 2;
  for (auto i : rows) {
    mpz_class sq = 0;
    for (std::size_t j = 0; j <= n; ++j) {
      sq += R[i][j].re * R[i][j].re + R[i][j].im * R[i][j].im;
    }
    bound += mpz_sizeinbase(sq.get_mpz_t(), 2) / 2 + 1;
  }

  // Unknowns 0..n-1 are the numerators, n is the determinant; re and im
  // parts are reconstructed separately.
  std::vector<mpz_class> re(n + 1), im(n + 1);
  mpz_class modulus = 1;
  std::vector<std::uint32_t> used;
  std::size_t skipped = 0;
  while (mpz_sizeinbase(modulus.get_mpz_t(), 2) <= bound + 1) {
    const auto ctx = PrimeFieldContext::random_31bit(rng);
    const std::uint64_t p = ctx.modulus();
    if (std::find(used.begin(), used.end(), ctx.modulus()) != used.end()) {
      continue;
    }
    used.push_back(ctx.modulus());
    const std::uint64_t s = ctx.imaginary_unit().value();
    std::vector<std::uint64_t> u, v;
    std::uint64_t du = 0, dv = 0;
    for (int e = 0; e < 2; ++e) {
      const std::uint64_t root = e == 0 ? s : p - s;
      std::vector<std::vector<std::uint64_t>> M(
          n, std::vector<std::uint64_t>(n + 1));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
          M[i][j] = embed(R[rows[i]][j], p, root);
        }
      }
      (e == 0 ? du : dv) = detail::cramer_mod(std::move(M), p, e == 0 ? u : v);
    }
    if (du == 0 || dv == 0) {
      // p divides the determinant; this prime carries no information.
      if (++skipped > 64) return std::nullopt;
      continue;
    }
    u.push_back(du);
    v.push_back(dv);
    const std::uint64_t inv2 = (p + 1) / 2;
    const std::uint64_t inv2s = inv2 * detail::pow_mod(s, p - 2, p) % p;
    const std::uint64_t mod_inv =
        detail::pow_mod(detail::residue(modulus, p), p - 2, p);
    for (std::size_t k = 0; k <= n; ++k) {
      const std::uint64_t a = (u[k] + v[k]) % p * inv2 % p;
      const std::uint64_t c = (u[k] + p - v[k]) % p * inv2s % p;
      for (auto [part, target] : {std::pair{&re[k], a}, std::pair{&im[k], c}}) {
        // Garner step: part += modulus * ((target - part) / modulus mod p).
        const std::uint64_t cur = detail::residue(*part, p);
        const std::uint64_t t = (target + p - cur) % p * mod_inv % p;
        mpz_addmul_ui(part->get_mpz_t(), modulus.get_mpz_t(), t);
      }
    }
    modulus *= static_cast<unsigned long>(p);
  }
  const mpz_class half = modulus / 2;
  std::vector<GaussInt> y(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    if (re[k] > half) re[k] -= modulus;
    if (im[k] > half) im[k] -= modulus;
    y[k] = GaussInt{re[k], im[k]};
  }
  const GaussInt d = y[n];
  if (d.is_zero()) return std::nullopt;
  // Exact check on every row: sum_j R_ij y_j == d * R_in.
  mpz_class tr, ti;
  for (std::size_t i = 0; i < m; ++i) {
    tr = 0;
    ti = 0;
    for (std::size_t j = 0; j < n; ++j) {
      mpz_addmul(tr.get_mpz_t(), R[i][j].re.get_mpz_t(), y[j].re.get_mpz_t());
      mpz_submul(tr.get_mpz_t(), R[i][j].im.get_mpz_t(), y[j].im.get_mpz_t());
      mpz_addmul(ti.get_mpz_t(), R[i][j].re.get_mpz_t(), y[j].im.get_mpz_t());
      mpz_addmul(ti.get_mpz_t(), R[i][j].im.get_mpz_t(), y[j].re.get_mpz_t());
    }
    mpz_submul(tr.get_mpz_t(), d.re.get_mpz_t(), R[i][n].re.get_mpz_t());
    mpz_addmul(tr.get_mpz_t(), d.im.get_mpz_t(), R[i][n].im.get_mpz_t());
    mpz_submul(ti.get_mpz_t(), d.re.get_mpz_t(), R[i][n].im.get_mpz_t());
    mpz_submul(ti.get_mpz_t(), d.im.get_mpz_t(), R[i][n].re.get_mpz_t());
    if (sgn(tr) != 0 || sgn(ti) != 0) return std::nullopt;
  }
  auto to_q = [](const GaussInt& g) {
    return GaussianRational(mpq_class(g.re), mpq_class(g.im));
  };
  ScaledSolution out;
  for (std::size_t k = 0; k < n; ++k) out.y.push_back(to_q(y[k]));
  out.d = to_q(d);
  return out;
}

/// Same as solve_fraction_free_scaled, divided out.
inline std::optional<std::vector<GaussianRational>> solve_fraction_free(
    const Matrix<GaussianRational>& A, const std::vector<GaussianRational>& b) {
  auto s = solve_fraction_free_scaled(A, b);
  if (!s) return std::nullopt;
  for (auto& v : s->y) v /= s->d;
  return std::move(s->y);
}

}  // namespace iia::algebra
