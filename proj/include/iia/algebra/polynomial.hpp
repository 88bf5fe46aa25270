#pragma once

#include <algorithm>
#include <cctype>
#include <concepts>
#include <cstddef>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iia/algebra/gaussian_rational.hpp"
#include "iia/algebra/monomial.hpp"
#include "iia/algebra/prime_field.hpp"
#include "iia/errors.hpp"

namespace iia::algebra {

/// Coefficient domain of all exact computation: a field with a runtime
/// context object that manufactures constants.
template <class F>
concept ExactScalar = std::regular<F> && requires(F a, const F& b,
                                                  const typename F::Context& c) {
  { a + b } -> std::same_as<F>;
  { a - b } -> std::same_as<F>;
  { a * b } -> std::same_as<F>;
  { a / b } -> std::same_as<F>;
  { -a } -> std::same_as<F>;
  { a.is_zero() } -> std::same_as<bool>;
  { a.inverse() } -> std::same_as<F>;
  { a.context() } -> std::same_as<typename F::Context>;
  { c.zero() } -> std::same_as<F>;
  { c.one() } -> std::same_as<F>;
  { c.from_int(std::int64_t{}) } -> std::same_as<F>;
};

inline std::string format_coefficient(const GaussianRational& c) {
  return "(" + c.to_string() + ")";
}
inline std::string format_coefficient(const PrimeFieldElement& c) {
  return c.to_string();
}
inline GaussianRational parse_coefficient(std::string_view text,
                                          const GaussianRationalContext&) {
  return GaussianRational::parse(text);
}
inline PrimeFieldElement parse_coefficient(std::string_view text,
                                           const PrimeFieldContext& ctx) {
  return PrimeFieldElement::parse(text, ctx);
}

/// Variable catalog + scalar context + monomial order. Shared, immutable.
template <ExactScalar F>
class PolynomialRing {
 public:
  using Context = typename F::Context;

  PolynomialRing(std::vector<std::string> names, Context ctx,
                 MonomialOrder order)
      : names_(std::move(names)), ctx_(std::move(ctx)), order_(order) {}

  static std::shared_ptr<const PolynomialRing> make(
      std::vector<std::string> names, Context ctx = {},
      MonomialOrder order = MonomialOrder::grevlex) {
    return std::make_shared<const PolynomialRing>(std::move(names),
                                                  std::move(ctx), order);
  }

  std::size_t num_vars() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const Context& context() const { return ctx_; }
  MonomialOrder order() const { return order_; }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return i;
    }
    throw InvalidArgument("unknown variable '" + std::string(name) + "'");
  }

  std::shared_ptr<const PolynomialRing> with_order(MonomialOrder order) const {
    return make(names_, ctx_, order);
  }

  bool same_as(const PolynomialRing& other) const {
    return this == &other || (order_ == other.order_ &&
                              ctx_ == other.ctx_ && names_ == other.names_);
  }

 private:
  std::vector<std::string> names_;
  Context ctx_;
  MonomialOrder order_;
};

template <ExactScalar F>
using RingPtr = std::shared_ptr<const PolynomialRing<F>>;

template <ExactScalar F>
struct Term {
  Monomial monomial;
  F coeff;
};

/// Sparse multivariate polynomial. Terms are kept strictly decreasing in the
/// ring's monomial order with no zero coefficients; the zero polynomial has
/// no terms.
template <ExactScalar F>
class Polynomial {
 public:
  using Scalar = F;
  using Ring = PolynomialRing<F>;

  Polynomial() = default;
  explicit Polynomial(RingPtr<F> ring) : ring_(std::move(ring)) {}

  /// Arbitrary term list: sorted, like terms combined, zeros dropped.
  static Polynomial from_terms(RingPtr<F> ring, std::vector<Term<F>> terms) {
    Polynomial p(std::move(ring));
    const auto order = p.ring_->order();
    for (const auto& t : terms) {
      if (t.monomial.size() != p.ring_->num_vars()) {
        throw ContextMismatch("monomial arity does not match ring");
      }
    }
    std::sort(terms.begin(), terms.end(), [order](const auto& a, const auto& b) {
      return Monomial::compare(a.monomial, b.monomial, order) > 0;
    });
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
        p.terms_.back().coeff += t.coeff;
        if (p.terms_.back().coeff.is_zero()) p.terms_.pop_back();
      } else if (!t.coeff.is_zero()) {
        p.terms_.push_back(std::move(t));
      }
    }
    return p;
  }

  /// Adopt a term list already in canonical form. Unchecked.
  static Polynomial from_sorted_terms(RingPtr<F> ring,
                                      std::vector<Term<F>> terms) {
    Polynomial p(std::move(ring));
    p.terms_ = std::move(terms);
    return p;
  }

  static Polynomial constant(RingPtr<F> ring, const F& c) {
    Polynomial p(ring);
    if (!c.is_zero()) p.terms_.push_back({Monomial(ring->num_vars()), c});
    return p;
  }
  static Polynomial constant(RingPtr<F> ring, std::int64_t c) {
    return constant(ring, ring->context().from_int(c));
  }

  static Polynomial variable(RingPtr<F> ring, std::size_t index) {
    Polynomial p(ring);
    p.terms_.push_back({Monomial::variable(ring->num_vars(), index),
                        ring->context().one()});
    return p;
  }
  static Polynomial variable(RingPtr<F> ring, std::string_view name) {
    return variable(ring, ring->index_of(name));
  }

  static Polynomial monomial(RingPtr<F> ring, const F& c, Monomial m) {
    Polynomial p(std::move(ring));
    if (!c.is_zero()) p.terms_.push_back({std::move(m), c});
    return p;
  }

  const RingPtr<F>& ring() const { return ring_; }
  const std::vector<Term<F>>& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  /// Nonzero constant.
  bool is_constant() const {
    return terms_.size() == 1 && terms_.front().monomial.is_one();
  }

  const Term<F>& leading_term() const {
    require_nonzero("leading_term");
    return terms_.front();
  }
  const Monomial& leading_monomial() const { return leading_term().monomial; }
  const F& leading_coeff() const { return leading_term().coeff; }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, t.monomial.degree());
    return d;
  }

  Polynomial make_monic() const {
    if (is_zero()) return *this;
    return scale(leading_coeff().inverse());
  }

  Polynomial scale(const F& c) const {
    if (c.is_zero()) return Polynomial(ring_);
    Polynomial r(ring_);
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) r.terms_.push_back({t.monomial, t.coeff * c});
    return r;
  }

  /// c * m * this, order preserved because monomial orders are multiplicative.
  Polynomial mul_term(const F& c, const Monomial& m) const {
    if (c.is_zero()) return Polynomial(ring_);
    Polynomial r(ring_);
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      r.terms_.push_back({t.monomial * m, t.coeff * c});
    }
    return r;
  }

  /// this - c * m * other, as a single merge.
  Polynomial sub_mul_term(const F& c, const Monomial& m,
                          const Polynomial& other) const {
    check_ring(other);
    Polynomial r(ring_);
    r.terms_.reserve(terms_.size() + other.terms_.size());
    const auto order = ring_->order();
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < other.terms_.size()) {
      if (j == other.terms_.size()) {
        r.terms_.push_back(terms_[i++]);
        continue;
      }
      Monomial shifted = other.terms_[j].monomial * m;
      int cmp = i == terms_.size()
                    ? -1
                    : Monomial::compare(terms_[i].monomial, shifted, order);
      if (cmp > 0) {
        r.terms_.push_back(terms_[i++]);
      } else if (cmp < 0) {
        r.terms_.push_back({std::move(shifted), -(c * other.terms_[j].coeff)});
        ++j;
      } else {
        F coeff = terms_[i].coeff - c * other.terms_[j].coeff;
        if (!coeff.is_zero()) r.terms_.push_back({std::move(shifted), coeff});
        ++i;
        ++j;
      }
    }
    return r;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    return a.merge(b, false);
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a.merge(b, true);
  }
  Polynomial operator-() const { return scale(-ring_->context().one()); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_ring(b);
    if (a.is_zero() || b.is_zero()) return Polynomial(a.ring_);
    std::vector<Term<F>> prods;
    prods.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_) {
      for (const auto& t : b.terms_) {
        prods.push_back({s.monomial * t.monomial, s.coeff * t.coeff});
      }
    }
    return from_terms(a.ring_, std::move(prods));
  }

  friend Polynomial operator*(const F& c, const Polynomial& p) {
    return p.scale(c);
  }

  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t k = 0; k < a.terms_.size(); ++k) {
      if (a.terms_[k].monomial != b.terms_[k].monomial ||
          a.terms_[k].coeff != b.terms_[k].coeff) {
        return false;
      }
    }
    return true;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) {
    return !(a == b);
  }

  F evaluate(const std::vector<F>& point) const {
    if (point.size() != ring_->num_vars()) {
      throw InvalidArgument("evaluation point has wrong arity");
    }
    F sum = ring_->context().zero();
    for (const auto& t : terms_) {
      F v = t.coeff;
      for (std::size_t i = 0; i < point.size(); ++i) {
        for (unsigned e = 0; e < t.monomial[i]; ++e) v *= point[i];
      }
      sum += v;
    }
    return sum;
  }

  /// Same polynomial viewed in `ring` (same catalog and context, possibly a
  /// different order).
  Polynomial in_ring(RingPtr<F> ring) const {
    if (ring->names() != ring_->names() ||
        !(ring->context() == ring_->context())) {
      throw ContextMismatch("in_ring: catalog or context differs");
    }
    if (ring->order() == ring_->order()) return from_sorted_terms(ring, terms_);
    return from_terms(std::move(ring), terms_);
  }

  /// Text form: terms "coef*v1^e1*v2" joined by " + "; Q(i) coefficients
  /// are parenthesised "(a/b+c/d*i)", F_p coefficients are plain residues.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      if (k != 0) out += " + ";
      out += format_coefficient(terms_[k].coeff);
      const Monomial& m = terms_[k].monomial;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        out += "*";
        out += ring_->name(i);
        if (m[i] > 1) out += "^" + std::to_string(m[i]);
      }
    }
    return out;
  }

  static Polynomial parse(std::string_view text, RingPtr<F> ring);

 private:
  void require_nonzero(const char* what) const {
    if (terms_.empty()) {
      throw InvalidArgument(std::string(what) + " of the zero polynomial");
    }
  }

  void check_ring(const Polynomial& o) const {
    if (!ring_ || !o.ring_) throw ContextMismatch("polynomial without a ring");
    if (!ring_->same_as(*o.ring_)) {
      throw ContextMismatch("polynomials from different rings");
    }
  }

  Polynomial merge(const Polynomial& b, bool subtract) const {
    check_ring(b);
    Polynomial r(ring_);
    r.terms_.reserve(terms_.size() + b.terms_.size());
    const auto order = ring_->order();
    std::size_t i = 0, j = 0;
    while (i < terms_.size() && j < b.terms_.size()) {
      int cmp = Monomial::compare(terms_[i].monomial, b.terms_[j].monomial,
                                  order);
      if (cmp > 0) {
        r.terms_.push_back(terms_[i++]);
      } else if (cmp < 0) {
        const auto& t = b.terms_[j++];
        r.terms_.push_back({t.monomial, subtract ? -t.coeff : t.coeff});
      } else {
        F c = subtract ? terms_[i].coeff - b.terms_[j].coeff
                       : terms_[i].coeff + b.terms_[j].coeff;
        if (!c.is_zero()) r.terms_.push_back({terms_[i].monomial, c});
        ++i;
        ++j;
      }
    }
    for (; i < terms_.size(); ++i) r.terms_.push_back(terms_[i]);
    for (; j < b.terms_.size(); ++j) {
      const auto& t = b.terms_[j];
      r.terms_.push_back({t.monomial, subtract ? -t.coeff : t.coeff});
    }
    return r;
  }

  RingPtr<F> ring_;
  std::vector<Term<F>> terms_;
};

namespace detail {

/// Split on `sep` outside parentheses.
inline std::vector<std::string_view> split_top_level(std::string_view s,
                                                     char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '(') ++depth;
    if (s[k] == ')') --depth;
    if (depth < 0) throw ParseError("unbalanced parentheses");
    if (s[k] == sep && depth == 0) {
      parts.push_back(s.substr(start, k - start));
      start = k + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced parentheses");
  parts.push_back(s.substr(start));
  return parts;
}

/// Split a sum into signed terms on top-level '+' and binary '-'. A '-'
/// directly after '+', '*', '^' or at the start belongs to the term.
inline std::vector<std::pair<bool, std::string_view>> split_terms(
    std::string_view s) {
  std::vector<std::pair<bool, std::string_view>> parts;
  int depth = 0;
  std::size_t start = 0;
  bool negative = false;
  char prev = '+';  // last non-space character seen at depth 0
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char c = s[k];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw ParseError("unbalanced parentheses");
    if (depth == 0 && (c == '+' || (c == '-' && prev != '+' && prev != '*' &&
                                    prev != '^' && prev != '-'))) {
      parts.emplace_back(negative, s.substr(start, k - start));
      negative = c == '-';
      start = k + 1;
      prev = c == '-' ? '+' : c;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) prev = c;
  }
  if (depth != 0) throw ParseError("unbalanced parentheses");
  parts.emplace_back(negative, s.substr(start));
  return parts;
}

}  // namespace detail

template <ExactScalar F>
Polynomial<F> Polynomial<F>::parse(std::string_view text, RingPtr<F> ring) {
  text = detail::trim(text);
  if (text.empty()) throw ParseError("empty polynomial");
  if (text == "0") return Polynomial(ring);
  std::vector<Term<F>> terms;
  for (auto [negative, term_text] : detail::split_terms(text)) {
    term_text = detail::trim(term_text);
    if (term_text.empty()) throw ParseError("empty term");
    // "-x" is shorthand for "-1*x".
    if (term_text.front() == '-' && term_text.size() > 1 &&
        std::isalpha(static_cast<unsigned char>(term_text[1]))) {
      negative = !negative;
      term_text.remove_prefix(1);
    }
    F coeff = ring->context().one();
    Monomial m(ring->num_vars());
    bool first = true;
    for (std::string_view factor : detail::split_top_level(term_text, '*')) {
      factor = detail::trim(factor);
      if (factor.empty()) throw ParseError("empty factor");
      const char c0 = factor.front();
      const bool numeric = c0 == '(' || c0 == '-' ||
                           std::isdigit(static_cast<unsigned char>(c0));
      if (numeric) {
        if (!first) throw ParseError("coefficient must lead the term");
        coeff = parse_coefficient(factor, ring->context());
      } else {
        std::string_view name = factor;
        unsigned power = 1;
        if (auto caret = factor.find('^'); caret != std::string_view::npos) {
          name = detail::trim(factor.substr(0, caret));
          std::string exp(detail::trim(factor.substr(caret + 1)));
          if (exp.empty() ||
              exp.find_first_not_of("0123456789") != std::string::npos) {
            throw ParseError("bad exponent in '" + std::string(factor) + "'");
          }
          power = static_cast<unsigned>(std::stoul(exp));
        }
        std::size_t idx = 0;
        try {
          idx = ring->index_of(name);
        } catch (const InvalidArgument& e) {
          throw ParseError(e.what());
        }
        m.set(idx, m[idx] + power);
      }
      first = false;
    }
    if (negative) coeff = -coeff;
    terms.push_back({std::move(m), std::move(coeff)});
  }
  return from_terms(std::move(ring), std::move(terms));
}

/// Product of a list of polynomials (1 for an empty list).
template <ExactScalar F>
Polynomial<F> product(const RingPtr<F>& ring,
                      const std::vector<Polynomial<F>>& factors) {
  Polynomial<F> acc = Polynomial<F>::constant(ring, ring->context().one());
  for (const auto& f : factors) acc = acc * f;
  return acc;
}

}  // namespace iia::algebra
