#pragma once

// Dense univariate polynomials over Q in the parameter t.
//
// Coefficients are stored constant term first with the top coefficient
// nonzero; the zero polynomial has no coefficients and degree -infinity.
// Arithmetic is schoolbook. Products are formed over Z after clearing
// denominators, which keeps GMP canonicalization out of the inner loop.

#include <compare>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "canheight/errors.hpp"
#include "canheight/rational.hpp"

namespace canheight {

/// Polynomial degree with a distinguished -infinity for the zero polynomial.
/// Deliberately not convertible to an integer.
class Degree {
 public:
  static Degree neg_infinity() { return Degree(); }
  explicit Degree(std::size_t value) : value_(value) {}

  bool is_neg_infinity() const { return !value_.has_value(); }

  std::size_t value() const {
    if (!value_) throw Error(ErrorKind::invalid_input, "degree of the zero polynomial has no integer value");
    return *value_;
  }

  friend bool operator==(const Degree&, const Degree&) = default;
  friend std::strong_ordering operator<=>(const Degree& a, const Degree& b) {
    if (!a.value_ || !b.value_) {
      return static_cast<bool>(a.value_) <=> static_cast<bool>(b.value_);
    }
    return *a.value_ <=> *b.value_;
  }

 private:
  Degree() = default;
  std::optional<std::size_t> value_;
};

class Poly {
 public:
  Poly() = default;
  Poly(const Rational& constant) {  // NOLINT(google-explicit-constructor)
    if (!constant.is_zero()) coeffs_.push_back(constant);
  }
  explicit Poly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Poly monomial(const Rational& c, std::size_t k) {
    if (c.is_zero()) return {};
    std::vector<Rational> v(k + 1);
    v[k] = c;
    return Poly(std::move(v));
  }
  /// The parameter t itself.
  static Poly t() { return monomial(Rational(1), 1); }
  /// The linear factor (t - root).
  static Poly linear(const Rational& root) { return Poly(std::vector<Rational>{-root, Rational(1)}); }

  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }

  Degree degree() const {
    return coeffs_.empty() ? Degree::neg_infinity() : Degree(coeffs_.size() - 1);
  }

  /// Coefficient of t^k (zero beyond the degree).
  Rational coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Rational(); }
  const std::vector<Rational>& coefficients() const { return coeffs_; }

  const Rational& leading() const {
    if (coeffs_.empty()) throw Error(ErrorKind::invalid_input, "leading coefficient of zero polynomial");
    return coeffs_.back();
  }

  Poly monic() const {
    if (is_zero() || leading().is_one()) return *this;
    return *this * leading().inverse();
  }

  Rational evaluate(const Rational& t0) const {
    Rational acc;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t0 + *it;
    return acc;
  }

  Poly derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<Rational> v(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) v[k - 1] = coeffs_[k] * Rational(static_cast<long>(k));
    return Poly(std::move(v));
  }

  /// Least common multiple of the coefficient denominators (1 for zero).
  Integer denominator_lcm() const {
    Integer l(1);
    for (const auto& c : coeffs_) {
      if (!c.is_integer()) l = integer_lcm(l, c.den_ref());
    }
    return l;
  }

  /// Coefficients of scale * this, which are integers when scale is a
  /// multiple of denominator_lcm().
  std::vector<Integer> scaled_integer_coeffs(const Integer& scale) const {
    std::vector<Integer> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) {
      Integer v = c.num_ref() * scale;
      mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), c.den_ref().get_mpz_t());
      out.push_back(std::move(v));
    }
    return out;
  }

  static Poly from_integers(const std::vector<Integer>& coeffs, const Integer& den = Integer(1)) {
    std::vector<Rational> v;
    v.reserve(coeffs.size());
    if (den == 1) {
      for (const auto& c : coeffs) v.emplace_back(c);
    } else {
      for (const auto& c : coeffs) v.emplace_back(c, den);
    }
    return Poly(std::move(v));
  }

  Poly operator-() const {
    Poly out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }

  Poly& operator+=(const Poly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Rational& s) {
    if (s.is_zero()) return {};
    Poly out = a;
    for (auto& c : out.coeffs_) c *= s;
    return out;
  }
  friend Poly operator*(const Rational& s, const Poly& a) { return a * s; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_constant()) return b * a.coeffs_[0];
    if (b.is_constant()) return a * b.coeffs_[0];
    const Integer la = a.denominator_lcm();
    const Integer lb = b.denominator_lcm();
    const auto ia = a.scaled_integer_coeffs(la);
    const auto ib = b.scaled_integer_coeffs(lb);
    std::vector<Integer> out(ia.size() + ib.size() - 1);
    for (std::size_t i = 0; i < ia.size(); ++i) {
      if (ia[i] == 0) continue;
      for (std::size_t j = 0; j < ib.size(); ++j) {
        mpz_addmul(out[i + j].get_mpz_t(), ia[i].get_mpz_t(), ib[j].get_mpz_t());
      }
    }
    return from_integers(out, la * lb);
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = coeffs_.size(); k-- > 0;) {
      const Rational& c = coeffs_[k];
      if (c.is_zero()) continue;
      Rational mag = c.abs();
      if (first) {
        if (c.sign() < 0) os << "-";
      } else {
        os << (c.sign() < 0 ? " - " : " + ");
      }
      first = false;
      bool unit = mag.is_one();
      if (k == 0 || !unit) os << mag.to_string();
      if (k >= 1) os << (unit ? "" : "*") << "t";
      if (k >= 2) os << "^" << k;
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  }

  std::vector<Rational> coeffs_;
};

/// Quotient and remainder of Euclidean division; throws on a zero divisor.
inline std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw Error(ErrorKind::zero_denominator, "polynomial division by zero");
  if (a.degree() < b.degree()) return {Poly(), a};
  std::vector<Rational> rem = a.coefficients();
  const std::size_t db = b.degree().value();
  const std::size_t da = a.degree().value();
  std::vector<Rational> quot(da - db + 1);
  const Rational inv_lead = b.leading().inverse();
  const auto& bc = b.coefficients();
  for (std::size_t k = da + 1; k-- > db;) {
    if (rem[k].is_zero()) continue;
    Rational f = rem[k] * inv_lead;
    quot[k - db] = f;
    for (std::size_t j = 0; j <= db; ++j) {
      if (!bc[j].is_zero()) rem[k - db + j] -= f * bc[j];
    }
  }
  rem.resize(db);
  return {Poly(std::move(quot)), Poly(std::move(rem))};
}

inline Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

/// a / b where b is known to divide a; throws if a remainder is left.
inline Poly exact_quotient(const Poly& a, const Poly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw Error(ErrorKind::invalid_input, "inexact polynomial division");
  return q;
}

/// Monic greatest common divisor; gcd(a, 0) = monic(a) and gcd(0, 0) = 0.
inline Poly poly_gcd(Poly a, Poly b) {
  a = a.monic();
  b = b.monic();
  while (!b.is_zero()) {
    Poly r = (a % b).monic();
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

/// Exponent of (t - root) in p; p must be nonzero.
inline int root_multiplicity(Poly p, const Rational& root) {
  if (p.is_zero()) throw Error(ErrorKind::invalid_input, "multiplicity of a root of the zero polynomial");
  const Poly lin = Poly::linear(root);
  int mult = 0;
  while (p.evaluate(root).is_zero()) {
    p = exact_quotient(p, lin);
    ++mult;
  }
  return mult;
}

// JSON: array of coefficient strings, constant term first.
inline void to_json(nlohmann::json& j, const Poly& p) {
  j = nlohmann::json::array();
  for (const auto& c : p.coefficients()) j.push_back(c.to_string());
}

inline void to_json(nlohmann::json& j, const Rational& r) { j = r.to_string(); }

inline Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw Error(ErrorKind::parse, "expected a rational as \"p/q\" string, got " + j.dump());
}

inline Poly poly_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::parse, "expected a polynomial coefficient array, got " + j.dump());
  std::vector<Rational> v;
  for (const auto& c : j) v.push_back(rational_from_json(c));
  return Poly(std::move(v));
}

}  // namespace canheight
