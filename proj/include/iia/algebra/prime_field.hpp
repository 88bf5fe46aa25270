#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <string_view>

#include "iia/algebra/gaussian_rational.hpp"
#include "iia/errors.hpp"

namespace iia::algebra {

namespace detail {

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp,
                             std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp != 0) {
    if (exp & 1U) result = result * base % mod;
    base = base * base % mod;
    exp >>= 1U;
  }
  return result;
}

}  // namespace detail

/// Deterministic Miller-Rabin, exact for every n < 2^32.
inline bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t small : {2U, 3U, 5U, 7U, 11U, 13U}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 7ULL, 61ULL}) {
    std::uint64_t x = detail::pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

class PrimeFieldElement;

/// F_p with p prime and p = 1 (mod 4), so that -1 has a square root and the
/// Gaussian integers map homomorphically into the field.
class PrimeFieldContext {
 public:
  PrimeFieldContext() : PrimeFieldContext(2147483629U) {}

  explicit PrimeFieldContext(std::uint32_t p) : p_(p) {
    if (!is_prime(p)) {
      throw InvalidArgument("modulus " + std::to_string(p) + " is not prime");
    }
    if (p % 4 == 1) {
      // Any quadratic non-residue c gives sqrt(-1) = c^((p-1)/4).
      for (std::uint64_t c = 2;; ++c) {
        if (detail::pow_mod(c, (p - 1) / 2, p) == p - 1) {
          sqrt_minus_one_ = static_cast<std::uint32_t>(
              detail::pow_mod(c, (p - 1) / 4, p));
          break;
        }
      }
    }
  }

  /// Uniformly random prime in [2^30, 2^31) with p = 1 (mod 4).
  template <class Rng>
  static PrimeFieldContext random_31bit(Rng& rng) {
    std::uniform_int_distribution<std::uint32_t> dist(1U << 28U,
                                                      (1U << 29U) - 1);
    for (;;) {
      std::uint32_t candidate = 4 * dist(rng) + 1;
      if (is_prime(candidate)) return PrimeFieldContext(candidate);
    }
  }

  std::uint32_t modulus() const { return p_; }
  bool has_imaginary_unit() const { return sqrt_minus_one_ != 0; }

  PrimeFieldElement zero() const;
  PrimeFieldElement one() const;
  PrimeFieldElement from_int(std::int64_t n) const;
  PrimeFieldElement imaginary_unit() const;
  /// Ring map Z[i][1/den] -> F_p; throws if a denominator vanishes mod p.
  PrimeFieldElement map(const GaussianRational& q) const;
  std::string name() const { return "F_" + std::to_string(p_); }

  friend bool operator==(const PrimeFieldContext& a,
                         const PrimeFieldContext& b) {
    return a.p_ == b.p_;
  }

 private:
  std::uint32_t p_;
  std::uint32_t sqrt_minus_one_ = 0;
};

/// Residue in [0, p). Carries its modulus so that mixing contexts is caught.
class PrimeFieldElement {
 public:
  using Context = PrimeFieldContext;

  PrimeFieldElement() = default;
  PrimeFieldElement(std::uint32_t value, std::uint32_t modulus)
      : v_(value % modulus), p_(modulus) {}

  std::uint32_t value() const { return v_; }
  std::uint32_t modulus() const { return p_; }
  Context context() const { return Context(p_); }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  PrimeFieldElement inverse() const {
    if (v_ == 0) throw InvalidArgument("inverse of zero in F_p");
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = p_, new_r = v_;
    while (new_r != 0) {
      std::int64_t q = r / new_r;
      std::int64_t tmp = t - q * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - q * new_r;
      r = new_r;
      new_r = tmp;
    }
    if (t < 0) t += p_;
    return {static_cast<std::uint32_t>(t), p_};
  }

  PrimeFieldElement& operator+=(const PrimeFieldElement& o) {
    check(o);
    std::uint64_t s = std::uint64_t{v_} + o.v_;
    v_ = static_cast<std::uint32_t>(s >= p_ ? s - p_ : s);
    return *this;
  }
  PrimeFieldElement& operator-=(const PrimeFieldElement& o) {
    check(o);
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + (p_ - o.v_);
    return *this;
  }
  PrimeFieldElement& operator*=(const PrimeFieldElement& o) {
    check(o);
    v_ = static_cast<std::uint32_t>(std::uint64_t{v_} * o.v_ % p_);
    return *this;
  }
  PrimeFieldElement& operator/=(const PrimeFieldElement& o) {
    check(o);
    return *this *= o.inverse();
  }

  friend PrimeFieldElement operator+(PrimeFieldElement a,
                                     const PrimeFieldElement& b) {
    return a += b;
  }
  friend PrimeFieldElement operator-(PrimeFieldElement a,
                                     const PrimeFieldElement& b) {
    return a -= b;
  }
  friend PrimeFieldElement operator*(PrimeFieldElement a,
                                     const PrimeFieldElement& b) {
    return a *= b;
  }
  friend PrimeFieldElement operator/(PrimeFieldElement a,
                                     const PrimeFieldElement& b) {
    return a /= b;
  }
  PrimeFieldElement operator-() const { return {v_ == 0 ? 0 : p_ - v_, p_}; }

  friend bool operator==(const PrimeFieldElement& a,
                         const PrimeFieldElement& b) {
    return a.v_ == b.v_ && a.p_ == b.p_;
  }
  friend bool operator!=(const PrimeFieldElement& a,
                         const PrimeFieldElement& b) {
    return !(a == b);
  }

  std::string to_string() const { return std::to_string(v_); }

  static PrimeFieldElement parse(std::string_view text, const Context& ctx) {
    text = detail::trim(text);
    if (text.empty()) throw ParseError("empty residue");
    bool negative = false;
    if (text.front() == '-') {
      negative = true;
      text.remove_prefix(1);
    }
    std::uint64_t v = 0;
    for (char c : text) {
      if (c < '0' || c > '9') {
        throw ParseError("bad residue literal '" + std::string(text) + "'");
      }
      v = (v * 10 + static_cast<std::uint64_t>(c - '0')) % ctx.modulus();
    }
    PrimeFieldElement e(static_cast<std::uint32_t>(v), ctx.modulus());
    return negative ? -e : e;
  }

  friend std::ostream& operator<<(std::ostream& os,
                                  const PrimeFieldElement& e) {
    return os << e.v_;
  }

 private:
  void check(const PrimeFieldElement& o) const {
    if (p_ != o.p_) {
      throw ContextMismatch("mixing F_" + std::to_string(p_) + " and F_" +
                            std::to_string(o.p_));
    }
  }

  std::uint32_t v_ = 0;
  std::uint32_t p_ = 2;
};

inline PrimeFieldElement PrimeFieldContext::zero() const { return {0, p_}; }
inline PrimeFieldElement PrimeFieldContext::one() const { return {1, p_}; }
inline PrimeFieldElement PrimeFieldContext::from_int(std::int64_t n) const {
  std::int64_t r = n % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return {static_cast<std::uint32_t>(r), p_};
}
inline PrimeFieldElement PrimeFieldContext::imaginary_unit() const {
  if (!has_imaginary_unit()) {
    throw InvalidArgument(name() + " has no square root of -1");
  }
  return {sqrt_minus_one_, p_};
}

inline PrimeFieldElement PrimeFieldContext::map(
    const GaussianRational& q) const {
  auto map_rational = [this](const mpq_class& r) {
    mpz_class num = r.get_num() % p_;
    mpz_class den = r.get_den() % p_;
    if (den == 0) {
      throw NonGenericInstance("denominator vanishes modulo " +
                               std::to_string(p_));
    }
    if (num < 0) num += p_;
    PrimeFieldElement n(static_cast<std::uint32_t>(num.get_ui()), p_);
    PrimeFieldElement d(static_cast<std::uint32_t>(den.get_ui()), p_);
    return n / d;
  };
  PrimeFieldElement out = map_rational(q.real());
  if (sgn(q.imag()) != 0) out += imaginary_unit() * map_rational(q.imag());
  return out;
}

}  // namespace iia::algebra
