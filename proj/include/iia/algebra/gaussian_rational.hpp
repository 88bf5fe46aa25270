#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "iia/errors.hpp"

namespace iia::algebra {

class GaussianRational;

/// Q(i) needs no runtime parameters; every instance compares equal.
struct GaussianRationalContext {
  GaussianRational zero() const;
  GaussianRational one() const;
  GaussianRational from_int(std::int64_t n) const;
  GaussianRational imaginary_unit() const;
  std::string name() const { return "Q(i)"; }
  friend bool operator==(const GaussianRationalContext&,
                         const GaussianRationalContext&) = default;
};

/// Element re + im*i of the Gaussian rationals. Both parts are GMP rationals,
/// kept canonical (reduced, positive denominator) by every operation.
class GaussianRational {
 public:
  using Context = GaussianRationalContext;

  GaussianRational() = default;
  GaussianRational(mpq_class re, mpq_class im = 0)
      : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }
  GaussianRational(std::int64_t re) : re_(static_cast<long>(re)), im_(0) {}
  GaussianRational(int re) : re_(re), im_(0) {}

  /// (re_num/re_den) + (im_num/im_den) i
  static GaussianRational from_fractions(std::int64_t re_num,
                                         std::int64_t re_den,
                                         std::int64_t im_num,
                                         std::int64_t im_den) {
    if (re_den == 0 || im_den == 0) {
      throw InvalidArgument("zero denominator in Gaussian rational");
    }
    mpq_class re(mpz_class(static_cast<long>(re_num)),
                 mpz_class(static_cast<long>(re_den)));
    mpq_class im(mpz_class(static_cast<long>(im_num)),
                 mpz_class(static_cast<long>(im_den)));
    return {re, im};
  }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }
  Context context() const { return {}; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }

  GaussianRational inverse() const {
    if (is_zero()) throw InvalidArgument("inverse of zero in Q(i)");
    mpq_class n = norm();
    return {re_ / n, -im_ / n};
  }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
      re_ *= o.re_;
      return *this;
    }
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    if (sgn(o.im_) == 0) {
      if (sgn(o.re_) == 0) throw InvalidArgument("division by zero in Q(i)");
      re_ /= o.re_;
      im_ /= o.re_;
      return *this;
    }
    return *this *= o.inverse();
  }

  friend GaussianRational operator+(GaussianRational a,
                                    const GaussianRational& b) {
    return a += b;
  }
  friend GaussianRational operator-(GaussianRational a,
                                    const GaussianRational& b) {
    return a -= b;
  }
  friend GaussianRational operator*(GaussianRational a,
                                    const GaussianRational& b) {
    return a *= b;
  }
  friend GaussianRational operator/(GaussianRational a,
                                    const GaussianRational& b) {
    return a /= b;
  }
  GaussianRational operator-() const { return {-re_, -im_}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) {
    return !(a == b);
  }

  /// Canonical text "a/b+c/d*i"; integer parts drop the "/1".
  std::string to_string() const {
    std::string s = re_.get_str();
    if (sgn(im_) < 0) {
      s += "-";
      s += mpq_class(-im_).get_str();
    } else {
      s += "+";
      s += im_.get_str();
    }
    s += "*i";
    return s;
  }

  /// Inverse of to_string(). Also accepts a bare rational ("3/4") or a bare
  /// imaginary part ("2*i", "-i").
  static GaussianRational parse(std::string_view text);

  double real_double() const { return re_.get_d(); }
  double imag_double() const { return im_.get_d(); }

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& g) {
    return os << g.to_string();
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

inline GaussianRational GaussianRationalContext::zero() const { return {}; }
inline GaussianRational GaussianRationalContext::one() const {
  return GaussianRational(1);
}
inline GaussianRational GaussianRationalContext::from_int(
    std::int64_t n) const {
  return GaussianRational(n);
}
inline GaussianRational GaussianRationalContext::imaginary_unit() const {
  return GaussianRational(mpq_class(0), mpq_class(1));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

inline mpq_class parse_rational(std::string_view s) {
  s = trim(s);
  if (s.empty()) throw ParseError("empty rational");
  std::string buf(s);
  if (buf.front() == '+') buf.erase(0, 1);
  for (char c : buf) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
          c == '/')) {
      throw ParseError("bad rational literal '" + std::string(s) + "'");
    }
  }
  mpq_class q;
  if (q.set_str(buf, 10) != 0) {
    throw ParseError("bad rational literal '" + std::string(s) + "'");
  }
  if (q.get_den() == 0) throw ParseError("zero denominator");
  q.canonicalize();
  return q;
}

}  // namespace detail

inline GaussianRational GaussianRational::parse(std::string_view text) {
  std::string_view s = detail::trim(text);
  if (!s.empty() && s.front() == '(' && s.back() == ')') {
    s = detail::trim(s.substr(1, s.size() - 2));
  }
  if (s.empty()) throw ParseError("empty Gaussian rational");
  if (s.back() != 'i') return {detail::parse_rational(s), 0};

  // Strip the trailing "i" and an optional "*".
  std::string_view head = s.substr(0, s.size() - 1);
  if (!head.empty() && head.back() == '*') head.remove_suffix(1);
  // The split point is the last sign that is not the leading character.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = head.size(); k-- > 1;) {
    if (head[k] == '+' || head[k] == '-') {
      split = (head[k - 1] == '+' || head[k - 1] == '-') ? k - 1 : k;
      break;
    }
  }
  auto imag_of = [](std::string_view part) -> mpq_class {
    part = detail::trim(part);
    if (part.empty() || part == "+") return 1;
    if (part == "-") return -1;
    return detail::parse_rational(part);
  };
  if (split == std::string_view::npos) return {0, imag_of(head)};
  return {detail::parse_rational(head.substr(0, split)),
          imag_of(head.substr(split))};
}

}  // namespace iia::algebra
