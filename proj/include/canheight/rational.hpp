#pragma once

/**
 * @file rational.hpp
 * @brief Arbitrary-precision exact rationals.
 *
 * Thin value type over GMP's mpq_class. Every Rational is kept in canonical
 * form: gcd(|num|, den) = 1, den >= 1, and zero is 0/1. Serialization uses
 * "p/q" with the "/q" omitted when q = 1.
 */

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "canheight/errors.hpp"

namespace canheight {

using Integer = mpz_class;

class Rational {
 public:
  Rational() = default;
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : q_(static_cast<long>(value)) {}  // NOLINT
  explicit Rational(const Integer& value) : q_(value) {}
  explicit Rational(mpq_class value) : q_(std::move(value)) { q_.canonicalize(); }

  Rational(const Integer& num, const Integer& den) {
    if (den == 0) throw Error(ErrorKind::zero_denominator, "rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  Rational(long num, long den) : Rational(Integer(num), Integer(den)) {}

  /// Builds num/den without a gcd pass; the caller guarantees gcd = 1 and den > 0.
  static Rational from_coprime(const Integer& num, const Integer& den) {
    Rational out;
    mpq_set_num(out.q_.get_mpq_t(), num.get_mpz_t());
    mpq_set_den(out.q_.get_mpq_t(), den.get_mpz_t());
    return out;
  }

  /// Parses "p", "-p" or "p/q" (surrounding whitespace allowed).
  static Rational parse(std::string_view text) {
    std::string s(text);
    auto first = s.find_first_not_of(" \t\n");
    auto last = s.find_last_not_of(" \t\n");
    if (first == std::string::npos) throw Error(ErrorKind::parse, "empty rational literal");
    s = s.substr(first, last - first + 1);
    auto slash = s.find('/');
    Integer num, den(1);
    auto parse_int = [&](const std::string& part, Integer& out) {
      std::string digits = part;
      if (!digits.empty() && digits[0] == '+') digits.erase(0, 1);
      if (digits.empty() || out.set_str(digits, 10) != 0)
        throw Error(ErrorKind::parse, "malformed rational literal '" + s + "'");
    };
    if (slash == std::string::npos) {
      parse_int(s, num);
    } else {
      parse_int(s.substr(0, slash), num);
      parse_int(s.substr(slash + 1), den);
      if (den == 0) throw Error(ErrorKind::zero_denominator, "rational literal '" + s + "' has zero denominator");
    }
    return Rational(num, den);
  }

  Integer num() const { return q_.get_num(); }
  Integer den() const { return q_.get_den(); }
  const mpz_class& num_ref() const { return q_.get_num(); }
  const mpz_class& den_ref() const { return q_.get_den(); }
  const mpq_class& gmp() const { return q_; }

  bool is_zero() const { return sgn(q_) == 0; }
  bool is_one() const { return q_ == 1; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }

  double to_double() const { return q_.get_d(); }

  std::string to_string() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  Rational inverse() const {
    if (is_zero()) throw Error(ErrorKind::zero_denominator, "inverse of zero");
    return Rational(mpq_class(1 / q_));
  }

  Rational abs() const { return Rational(mpq_class(::abs(q_))); }

  Rational operator-() const { return Rational(mpq_class(-q_)); }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error(ErrorKind::zero_denominator, "division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  mpq_class q_{0};
};

/// log |n| for n != 0, accurate for integers far beyond double range.
inline double log_abs(const Integer& n) {
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, n.get_mpz_t());
  if (mantissa == 0.0) throw Error(ErrorKind::invalid_input, "log of zero");
  return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

inline Integer integer_lcm(const Integer& a, const Integer& b) {
  Integer out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

/// Sign of |a| - |b|.
inline int cmp_abs(const Integer& a, const Integer& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

inline Integer integer_gcd(const Integer& a, const Integer& b) {
  Integer out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

}  // namespace canheight
