#pragma once

// Elements of Q(t) in canonical form: num/den with gcd(num, den) = 1 and den
// monic, so that equality of values is equality of stored data.

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "canheight/errors.hpp"
#include "canheight/poly.hpp"
#include "canheight/rational.hpp"

namespace canheight {

/// Raised when a rational function is evaluated at one of its poles.
class PoleError : public Error {
 public:
  PoleError(const Rational& at, int multiplicity)
      : Error(ErrorKind::pole, "pole of order " + std::to_string(multiplicity) + " at t = " + at.to_string()),
        at_(at),
        multiplicity_(multiplicity) {}

  const Rational& at() const { return at_; }
  int multiplicity() const { return multiplicity_; }

 private:
  Rational at_;
  int multiplicity_;
};

class RatFunc {
 public:
  RatFunc() : den_(Rational(1)) {}
  RatFunc(const Rational& c) : num_(c), den_(Rational(1)) {}  // NOLINT(google-explicit-constructor)
  RatFunc(long c) : RatFunc(Rational(c)) {}                   // NOLINT
  RatFunc(int c) : RatFunc(Rational(c)) {}                    // NOLINT
  explicit RatFunc(Poly p) : num_(std::move(p)), den_(Rational(1)) {}

  /// The unique reduced representative of num/den with monic denominator.
  static RatFunc normalize(Poly num, Poly den) {
    if (den.is_zero()) throw Error(ErrorKind::invalid_input, "rational function with zero denominator");
    RatFunc out;
    if (num.is_zero()) return out;
    Poly g = poly_gcd(num, den);
    if (!g.is_constant()) {
      num = exact_quotient(num, g);
      den = exact_quotient(den, g);
    }
    Rational lead = den.leading();
    if (!lead.is_one()) {
      Rational inv = lead.inverse();
      num = num * inv;
      den = den * inv;
    }
    out.num_ = std::move(num);
    out.den_ = std::move(den);
    return out;
  }

  /// Skips the gcd pass; the caller guarantees num and den are coprime.
  static RatFunc from_coprime(Poly num, Poly den) {
    if (den.is_zero()) throw Error(ErrorKind::invalid_input, "rational function with zero denominator");
    RatFunc out;
    if (num.is_zero()) return out;
    Rational lead = den.leading();
    if (!lead.is_one()) {
      Rational inv = lead.inverse();
      num = num * inv;
      den = den * inv;
    }
    out.num_ = std::move(num);
    out.den_ = std::move(den);
    return out;
  }

  static RatFunc t() { return RatFunc(Poly::t()); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  bool is_polynomial() const { return den_.is_constant(); }

  /// Exact value at t0; throws PoleError when den(t0) = 0.
  Rational evaluate(const Rational& t0) const {
    Rational d = den_.evaluate(t0);
    if (d.is_zero()) throw PoleError(t0, root_multiplicity(den_, t0));
    return num_.evaluate(t0) / d;
  }

  RatFunc operator-() const {
    RatFunc out = *this;
    out.num_ = -out.num_;
    return out;
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.den_ == b.den_) return normalize(a.num_ + b.num_, a.den_);
    return normalize(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return normalize(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw Error(ErrorKind::zero_denominator, "division by the zero rational function");
    return normalize(a.num_ * b.den_, a.den_ * b.num_);
  }

  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  std::string to_string() const {
    if (den_.is_constant()) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
  }

  friend std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << f.to_string(); }

 private:
  Poly num_;
  Poly den_;
};

inline RatFunc ratfunc_normalize(Poly num, Poly den) { return RatFunc::normalize(std::move(num), std::move(den)); }

// JSON: a bare coefficient array for polynomials, {"num": [...], "den": [...]}
// otherwise.
inline void to_json(nlohmann::json& j, const RatFunc& f) {
  if (f.is_polynomial()) {
    to_json(j, f.num());
    return;
  }
  nlohmann::json num, den;
  to_json(num, f.num());
  to_json(den, f.den());
  j = nlohmann::json{{"num", num}, {"den", den}};
}

inline RatFunc ratfunc_from_json(const nlohmann::json& j) {
  if (j.is_array()) return RatFunc(poly_from_json(j));
  if (j.is_object() && j.contains("num") && j.contains("den")) {
    return RatFunc::normalize(poly_from_json(j.at("num")), poly_from_json(j.at("den")));
  }
  throw Error(ErrorKind::parse, "expected a polynomial array or {\"num\", \"den\"} object, got " + j.dump());
}

}  // namespace canheight
