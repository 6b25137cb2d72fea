#pragma once

// x-only doubling orbit x([2^m]P), m = 0, 1, 2, ...
//
// The curve is moved to an integral model y^2 = x^3 + a' x + b' with
// a' = u^4 a, b' = u^6 b, x' = u^2 x, and x' is carried as a coprime pair
// (X, Z) over Z or Q[t]. One doubling is
//
//   X' = X^4 - 2a' X^2 Z^2 - 8b' X Z^3 + a'^2 Z^4
//   Z' = 4 Z (X^3 + a' X Z^2 + b' Z^3).
//
// For coprime X, Z the common factor of X' and Z' divides the resultant
// 256 (4a'^3 + 27b'^2)^2, so it is found by gcds against that small element
// instead of a gcd of two huge ones.

#include <algorithm>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "canheight/errors.hpp"
#include "canheight/rational.hpp"
#include "canheight/ratfunc.hpp"
#include "canheight/weierstrass.hpp"
#include "canheight/zpoly.hpp"

namespace canheight {

template <class F>
struct DoublingRing;

/// Q: elements are integers.
template <>
struct DoublingRing<Rational> {
  using Elem = Integer;
  using HeightType = double;

  static bool is_zero(const Elem& e) { return e == 0; }
  static Elem one() { return Elem(1); }
  static Elem mul(const Elem& a, const Elem& b) { return a * b; }
  static Elem combine(const std::vector<std::pair<long, Elem>>& terms) {
    Elem out(0);
    for (const auto& [c, e] : terms) out += c * e;
    return out;
  }

  /// gcd(x, bound) for a small positive bound.
  static Elem gcd_small(const Elem& x, const Elem& bound) {
    Elem r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), bound.get_mpz_t());
    return integer_gcd(r, bound);
  }
  static bool is_unit(const Elem& g) { return g == 1; }
  static Elem divide(const Elem& a, const Elem& g) {
    Elem out;
    mpz_divexact(out.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    return out;
  }
  static void canonicalize(Elem& num, Elem& den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
  }

  static HeightType height(const Elem& num, const Elem& den) {
    const Elem& big = cmp_abs(num, den) > 0 ? num : den;
    return log_abs(big);
  }
  static Rational value(const Elem& num, const Elem& den) { return Rational::from_coprime(num, den); }

  struct Model {
    Elem a, b, scale;
  };
  /// u = lcm of the coefficient denominators; scale = u^2.
  static Model integral_model(const Curve<Rational>& c) {
    Elem u = integer_lcm(c.a().den(), c.b().den());
    Elem u2 = u * u;
    Rational a = c.a() * Rational(Integer(u2 * u2));
    Rational b = c.b() * Rational(Integer(u2 * u2 * u2));
    return {a.num(), b.num(), u2};
  }
  static std::pair<Elem, Elem> split(const Rational& x) { return {x.num(), x.den()}; }
};

/// Q(t): elements are integer polynomials; the pair (X, Z) is only defined up
/// to a common scalar, the model coefficients and the scale are exact.
template <>
struct DoublingRing<RatFunc> {
  using Elem = zpoly::ZPoly;
  using HeightType = std::size_t;

  static bool is_zero(const Elem& e) { return e.empty(); }
  static Elem one() { return Elem{Integer(1)}; }
  static Elem mul(const Elem& a, const Elem& b) { return zpoly::mul(a, b); }
  static Elem combine(const std::vector<std::pair<long, Elem>>& terms) {
    std::vector<std::pair<Integer, const Elem*>> refs;
    refs.reserve(terms.size());
    for (const auto& [c, e] : terms) refs.emplace_back(Integer(c), &e);
    return zpoly::linear_combination(refs);
  }

  static Elem gcd_small(const Elem& x, const Elem& bound) { return zpoly::gcd_with_small(x, bound); }
  static bool is_unit(const Elem& g) { return g.size() == 1; }
  static Elem divide(const Elem& a, const Elem& g) {
    auto q = zpoly::exact_divide(a, g);
    if (!q) throw Error(ErrorKind::invalid_input, "internal: inexact division in doubling orbit");
    return *q;
  }
  static void canonicalize(Elem& num, Elem& den) {
    Integer g = zpoly::content(den);
    if (!num.empty()) g = integer_gcd(g, zpoly::content(num));
    if (den.back() < 0) g = -g;
    zpoly::divide_all(num, g);
    zpoly::divide_all(den, g);
  }

  static HeightType height(const Elem& num, const Elem& den) {
    std::size_t dn = num.empty() ? 0 : num.size() - 1;
    return std::max(dn, den.size() - 1);
  }
  static RatFunc value(const Elem& num, const Elem& den) {
    return RatFunc::from_coprime(zpoly::to_poly(num), zpoly::to_poly(den));
  }

  struct Model {
    Elem a, b, scale;
  };
  /// u = c * lcm(den a, den b) with the integer c chosen so that u, a u^4
  /// and b u^6 have integer coefficients; scale = u^2 exactly.
  static Model integral_model(const Curve<RatFunc>& c) {
    Poly u = exact_quotient(c.a().den() * c.b().den(), poly_gcd(c.a().den(), c.b().den()));
    u = u * Rational(u.denominator_lcm());
    Poly u2 = u * u;
    Poly a = exact_quotient(c.a().num() * u2 * u2, c.a().den());
    Poly b = exact_quotient(c.b().num() * u2 * u2 * u2, c.b().den());
    Rational k(integer_lcm(a.denominator_lcm(), b.denominator_lcm()));
    Rational k2 = k * k;
    return {zpoly::from_poly(a * (k2 * k2)), zpoly::from_poly(b * (k2 * k2 * k2)), zpoly::from_poly(u2 * k2)};
  }
  static std::pair<Elem, Elem> split(const RatFunc& x) {
    Elem num = zpoly::from_poly(x.num() * Rational(x.den().denominator_lcm()) *
                                Rational(x.num().denominator_lcm()));
    Elem den = zpoly::from_poly(x.den() * Rational(x.den().denominator_lcm()) *
                                Rational(x.num().denominator_lcm()));
    canonicalize(num, den);
    return {std::move(num), std::move(den)};
  }
};

template <ExactField F>
class DoublingOrbit {
  using Ring = DoublingRing<F>;
  using Elem = typename Ring::Elem;

 public:
  using HeightType = typename Ring::HeightType;

  DoublingOrbit(const Curve<F>& curve, const Point<F>& p) : model_(Ring::integral_model(curve)) {
    const auto& a = model_.a;
    const auto& b = model_.b;
    // resultant bound 256 (4a^3 + 27b^2)^2
    Elem a3 = Ring::mul(Ring::mul(a, a), a);
    Elem b2 = Ring::mul(b, b);
    Elem disc = Ring::combine({{4, a3}, {27, b2}});
    resultant_ = Ring::combine({{256, Ring::mul(disc, disc)}});
    a_sq_ = Ring::mul(a, a);
    if (p.is_infinity()) {
      x_num_ = Ring::one();
      z_ = Elem{};
    } else {
      auto [num, den] = Ring::split(p.x() * F(scale_value()));
      x_num_ = std::move(num);
      z_ = std::move(den);
    }
  }

  int index() const { return index_; }
  bool at_infinity() const { return Ring::is_zero(z_); }

  /// Replaces the current point by its double.
  void advance() {
    ++index_;
    if (at_infinity()) return;
    const Elem& X = x_num_;
    const Elem& Z = z_;
    Elem X2 = Ring::mul(X, X);
    Elem Z2 = Ring::mul(Z, Z);
    Elem XZ = Ring::mul(X, Z);
    Elem X4 = Ring::mul(X2, X2);
    Elem Z4 = Ring::mul(Z2, Z2);
    Elem X2Z2 = Ring::mul(XZ, XZ);
    Elem XZ3 = Ring::mul(XZ, Z2);
    Elem X3Z = Ring::mul(X2, XZ);
    Elem F_ = Ring::combine({{1, X4},
                             {-2, Ring::mul(model_.a, X2Z2)},
                             {-8, Ring::mul(model_.b, XZ3)},
                             {1, Ring::mul(a_sq_, Z4)}});
    Elem G_ = Ring::combine({{4, X3Z}, {4, Ring::mul(model_.a, XZ3)}, {4, Ring::mul(model_.b, Z4)}});
    if (Ring::is_zero(G_)) {
      x_num_ = Ring::one();
      z_ = Elem{};
      return;
    }
    Elem g = Ring::gcd_small(F_, resultant_);
    if (!Ring::is_unit(g)) g = Ring::gcd_small(G_, g);
    if (!Ring::is_unit(g)) {
      F_ = Ring::divide(F_, g);
      G_ = Ring::divide(G_, g);
    }
    Ring::canonicalize(F_, G_);
    x_num_ = std::move(F_);
    z_ = std::move(G_);
  }

  /// Reduced numerator and denominator of x = X / (Z u^2).
  std::pair<Elem, Elem> reduced_x() const {
    if (at_infinity()) throw Error(ErrorKind::invalid_input, "x-coordinate of the point at infinity");
    Elem g = Ring::gcd_small(x_num_, model_.scale);
    Elem num = x_num_;
    Elem scale = model_.scale;
    if (!Ring::is_unit(g)) {
      num = Ring::divide(num, g);
      scale = Ring::divide(scale, g);
    }
    Elem den = Ring::mul(z_, scale);
    Ring::canonicalize(num, den);
    return {std::move(num), std::move(den)};
  }

  F x() const {
    auto [num, den] = reduced_x();
    return Ring::value(num, den);
  }

  /// Naive height of x([2^m]P); zero at infinity.
  HeightType naive_height() const {
    if (at_infinity()) return HeightType{0};
    auto [num, den] = reduced_x();
    return Ring::height(num, den);
  }

 private:
  F scale_value() const {
    if constexpr (std::is_same_v<F, Rational>) {
      return Rational(model_.scale);
    } else {
      return RatFunc(zpoly::to_poly(model_.scale));
    }
  }

  typename Ring::Model model_;
  Elem resultant_;
  Elem a_sq_;
  Elem x_num_;
  Elem z_;
  int index_ = 0;
};

}  // namespace canheight
