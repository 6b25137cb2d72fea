#pragma once

/**
 * @file weierstrass.hpp
 * @brief Short Weierstrass curves y^2 = x^3 + a x + b and their group law
 *        over an exact field (Q via Rational, Q(t) via RatFunc).
 */

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "canheight/errors.hpp"
#include "canheight/rational.hpp"
#include "canheight/ratfunc.hpp"

namespace canheight {

template <class F>
concept ExactField = std::regular<F> && requires(F a, F b) {
  F(3L);
  { a + b } -> std::convertible_to<F>;
  { a - b } -> std::convertible_to<F>;
  { a * b } -> std::convertible_to<F>;
  { a / b } -> std::convertible_to<F>;
  { -a } -> std::convertible_to<F>;
  { a.is_zero() } -> std::convertible_to<bool>;
  { a.to_string() } -> std::convertible_to<std::string>;
};

static_assert(ExactField<Rational>);
static_assert(ExactField<RatFunc>);

template <ExactField F>
class Point {
 public:
  /// The identity O.
  Point() = default;
  Point(F x, F y) : coords_(std::in_place, std::move(x), std::move(y)) {}

  static Point infinity() { return Point(); }

  bool is_infinity() const { return !coords_.has_value(); }

  const F& x() const {
    if (!coords_) throw Error(ErrorKind::invalid_input, "x-coordinate of the point at infinity");
    return coords_->first;
  }
  const F& y() const {
    if (!coords_) throw Error(ErrorKind::invalid_input, "y-coordinate of the point at infinity");
    return coords_->second;
  }

  friend bool operator==(const Point&, const Point&) = default;

  std::string to_string() const {
    if (!coords_) return "O";
    return "(" + coords_->first.to_string() + ", " + coords_->second.to_string() + ")";
  }

 private:
  std::optional<std::pair<F, F>> coords_;
};

template <ExactField F>
class Curve {
 public:
  /// Throws singular-curve when 4a^3 + 27b^2 = 0.
  Curve(F a, F b) : a_(std::move(a)), b_(std::move(b)) {
    if (discriminant().is_zero()) {
      throw Error(ErrorKind::singular_curve,
                  "singular curve y^2 = x^3 + (" + a_.to_string() + ")x + (" + b_.to_string() + ")");
    }
  }

  const F& a() const { return a_; }
  const F& b() const { return b_; }

  /// -16 (4a^3 + 27b^2).
  F discriminant() const { return F(-16L) * (F(4L) * a_ * a_ * a_ + F(27L) * b_ * b_); }

  /// 1728 * 4a^3 / (4a^3 + 27b^2).
  F j_invariant() const {
    F four_a3 = F(4L) * a_ * a_ * a_;
    return F(1728L) * four_a3 / (four_a3 + F(27L) * b_ * b_);
  }

  /// Right-hand side x^3 + a x + b.
  F rhs(const F& x) const { return x * x * x + a_ * x + b_; }

  bool contains(const Point<F>& p) const {
    if (p.is_infinity()) return true;
    return p.y() * p.y() == rhs(p.x());
  }

  friend bool operator==(const Curve&, const Curve&) = default;

  std::string to_string() const {
    return "y^2 = x^3 + (" + a_.to_string() + ")*x + (" + b_.to_string() + ")";
  }

 private:
  F a_;
  F b_;
};

template <ExactField F>
Point<F> negate(const Point<F>& p) {
  if (p.is_infinity()) return p;
  return Point<F>(p.x(), -p.y());
}

/// Chord-tangent addition. Both points must lie on the curve.
template <ExactField F>
Point<F> group_add(const Curve<F>& c, const Point<F>& p, const Point<F>& q) {
  if (p.is_infinity()) return q;
  if (q.is_infinity()) return p;
  F slope;
  if (p.x() == q.x()) {
    if ((p.y() + q.y()).is_zero()) return Point<F>::infinity();
    slope = (F(3L) * p.x() * p.x() + c.a()) / (F(2L) * p.y());
  } else {
    slope = (q.y() - p.y()) / (q.x() - p.x());
  }
  F x3 = slope * slope - p.x() - q.x();
  F y3 = slope * (p.x() - x3) - p.y();
  return Point<F>(std::move(x3), std::move(y3));
}

template <ExactField F>
Point<F> double_point(const Curve<F>& c, const Point<F>& p) {
  return group_add(c, p, p);
}

/// [n]P by left-to-right double-and-add; negative n negates P first.
template <ExactField F>
Point<F> multiply(const Curve<F>& c, std::int64_t n, const Point<F>& p) {
  Point<F> base = n < 0 ? negate(p) : p;
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  Point<F> acc = Point<F>::infinity();
  for (int bit = 63; bit >= 0; --bit) {
    if (!acc.is_infinity()) acc = double_point(c, acc);
    if ((k >> bit) & 1U) acc = group_add(c, acc, base);
  }
  return acc;
}

/// Largest torsion order a point over Q (or a non-isotrivial Q(t)) can have.
inline constexpr int kMazurBound = 12;

/// Exact order of a torsion point over Q, or nullopt for a non-torsion point.
inline std::optional<int> torsion_order(const Curve<Rational>& c, const Point<Rational>& p) {
  Point<Rational> acc = p;
  for (int n = 1; n <= kMazurBound; ++n) {
    if (acc.is_infinity()) return n;
    acc = group_add(c, acc, p);
  }
  return std::nullopt;
}

/// j(t) constant.
inline bool is_isotrivial(const Curve<RatFunc>& c) { return c.j_invariant().is_constant(); }

/// Exact torsion order over Q(t) for a non-isotrivial curve; refuses
/// isotrivial input with an isotrivial-family error.
///
/// A fiber of good reduction is used to find the only possible order n (the
/// specialization map is injective on torsion there); the answer is then
/// confirmed by checking [n]P = O exactly in Q(t).
inline std::optional<int> torsion_order(const Curve<RatFunc>& c, const Point<RatFunc>& p) {
  if (is_isotrivial(c)) {
    throw Error(ErrorKind::isotrivial_family,
                "torsion over Q(t) is only decided for non-isotrivial curves (j(t) is constant)");
  }
  if (p.is_infinity()) return 1;
  for (long k = 0;; ++k) {
    // 0, 1, -1, 2, -2, ...
    Rational t0 = (k % 2 == 1) ? Rational((k + 1) / 2) : Rational(-k / 2);
    std::optional<int> fiber_order;
    try {
      Curve<Rational> fiber(c.a().evaluate(t0), c.b().evaluate(t0));
      Point<Rational> pt(p.x().evaluate(t0), p.y().evaluate(t0));
      fiber_order = torsion_order(fiber, pt);
    } catch (const Error&) {
      continue;  // pole or singular fiber
    }
    if (fiber_order && multiply(c, *fiber_order, p).is_infinity()) return fiber_order;
    return std::nullopt;
  }
}

}  // namespace canheight
