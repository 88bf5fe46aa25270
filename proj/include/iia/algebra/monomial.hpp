#pragma once

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "iia/errors.hpp"

namespace iia::algebra {

enum class MonomialOrder { lex, grevlex };

inline std::string to_string(MonomialOrder order) {
  return order == MonomialOrder::lex ? "lex" : "grevlex";
}

inline MonomialOrder parse_order(const std::string& name) {
  if (name == "lex") return MonomialOrder::lex;
  if (name == "grevlex") return MonomialOrder::grevlex;
  throw InvalidArgument("unknown monomial order '" + name + "'");
}

/// Exponent vector over a fixed number of variables. Exponents are capped at
/// 65535; the total degree and a 64-bit support mask are cached so that
/// comparison and divisibility tests reject early.
class Monomial {
 public:
  using Exponent = std::uint16_t;
  static constexpr unsigned kMaxExponent = 65535;

  Monomial() = default;
  explicit Monomial(std::size_t num_vars) : exps_(num_vars, 0) {}
  Monomial(std::initializer_list<unsigned> exps) {
    exps_.reserve(exps.size());
    for (unsigned e : exps) push(e);
  }
  explicit Monomial(const std::vector<unsigned>& exps) {
    exps_.reserve(exps.size());
    for (unsigned e : exps) push(e);
  }

  static Monomial variable(std::size_t num_vars, std::size_t index,
                           unsigned power = 1) {
    Monomial m(num_vars);
    m.set(index, power);
    return m;
  }

  std::size_t size() const { return exps_.size(); }
  unsigned operator[](std::size_t i) const { return exps_[i]; }
  unsigned degree() const { return degree_; }
  std::uint64_t support_mask() const { return mask_; }
  bool is_one() const { return degree_ == 0; }

  void set(std::size_t i, unsigned e) {
    if (e > kMaxExponent) throw InvalidArgument("exponent overflow");
    degree_ = degree_ - exps_[i] + e;
    exps_[i] = static_cast<Exponent>(e);
    recompute_mask();
  }

  /// True iff this monomial divides `other`.
  bool divides(const Monomial& other) const {
    if (degree_ > other.degree_) return false;
    if ((mask_ & ~other.mask_) != 0) return false;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i] > other.exps_[i]) return false;
    }
    return true;
  }

  /// Shares no variable with `other`.
  bool coprime_with(const Monomial& other) const {
    if ((mask_ & other.mask_) == 0) return true;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i] != 0 && other.exps_[i] != 0) return false;
    }
    return true;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    r.degree_ = a.degree_ + b.degree_;
    for (std::size_t i = 0; i < r.exps_.size(); ++i) {
      unsigned e = unsigned{a.exps_[i]} + b.exps_[i];
      if (e > kMaxExponent) throw InvalidArgument("exponent overflow");
      r.exps_[i] = static_cast<Exponent>(e);
    }
    r.mask_ = a.mask_ | b.mask_;
    return r;
  }

  /// this / divisor; requires divisor.divides(*this).
  Monomial quotient(const Monomial& divisor) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < r.exps_.size(); ++i) {
      r.exps_[i] = static_cast<Exponent>(r.exps_[i] - divisor.exps_[i]);
    }
    r.degree_ = degree_ - divisor.degree_;
    r.recompute_mask();
    return r;
  }

  static Monomial lcm(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    unsigned deg = 0;
    for (std::size_t i = 0; i < r.exps_.size(); ++i) {
      r.exps_[i] = std::max(a.exps_[i], b.exps_[i]);
      deg += r.exps_[i];
    }
    r.degree_ = deg;
    r.mask_ = a.mask_ | b.mask_;
    return r;
  }

  /// Three-way comparison under `order`: negative if a < b.
  static int compare(const Monomial& a, const Monomial& b,
                     MonomialOrder order) {
    const std::size_t n = a.exps_.size();
    if (order == MonomialOrder::grevlex) {
      if (a.degree_ != b.degree_) return a.degree_ < b.degree_ ? -1 : 1;
      for (std::size_t i = n; i-- > 0;) {
        if (a.exps_[i] != b.exps_[i]) return a.exps_[i] > b.exps_[i] ? -1 : 1;
      }
      return 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (a.exps_[i] != b.exps_[i]) return a.exps_[i] < b.exps_[i] ? -1 : 1;
    }
    return 0;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.degree_ == b.degree_ && a.mask_ == b.mask_ && a.exps_ == b.exps_;
  }
  friend bool operator!=(const Monomial& a, const Monomial& b) {
    return !(a == b);
  }

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ULL;
    for (Exponent e : exps_) h = (h ^ e) * 1099511628211ULL;
    return h;
  }

 private:
  void push(unsigned e) {
    if (e > kMaxExponent) throw InvalidArgument("exponent overflow");
    exps_.push_back(static_cast<Exponent>(e));
    degree_ += e;
    if (e != 0) mask_ |= std::uint64_t{1} << (exps_.size() - 1) % 64;
  }

  void recompute_mask() {
    mask_ = 0;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i] != 0) mask_ |= std::uint64_t{1} << (i % 64);
    }
  }

  boost::container::small_vector<Exponent, 32> exps_;
  unsigned degree_ = 0;
  std::uint64_t mask_ = 0;
};

}  // namespace iia::algebra
