#pragma once

// Shared fixtures: sample curves with known generators, random point pools
// built from small combinations of generators, and the sample families.

#include <random>
#include <string>
#include <vector>

#include "canheight/family.hpp"
#include "canheight/rational.hpp"
#include "canheight/ratfunc.hpp"
#include "canheight/weierstrass.hpp"

#ifndef CANHEIGHT_DATA_DIR
#define CANHEIGHT_DATA_DIR "data"
#endif

namespace canheight::testing {

inline std::string family_path(const std::string& name) {
  return std::string(CANHEIGHT_DATA_DIR) + "/families/" + name + ".json";
}

struct SampleCurve {
  std::string name;
  Curve<Rational> curve;
  std::vector<Point<Rational>> generators;
};

inline Point<Rational> qpt(long x, long y) { return Point<Rational>(Rational(x), Rational(y)); }

/// Non-torsion samples over Q.
inline std::vector<SampleCurve> sample_curves() {
  return {
      {"y^2=x^3+2", Curve<Rational>(Rational(0), Rational(2)), {qpt(-1, 1)}},
      {"y^2=x^3-2", Curve<Rational>(Rational(0), Rational(-2)), {qpt(3, 5)}},
      {"y^2=x^3+17", Curve<Rational>(Rational(0), Rational(17)), {qpt(-1, 4), qpt(-2, 3)}},
  };
}

inline RatFunc poly_rf(std::vector<long> coeffs) {
  std::vector<Rational> c;
  for (long v : coeffs) c.emplace_back(v);
  return RatFunc(Poly(c));
}

/// y^2 = x^3 + (t^2 - 2) x + 1 with sections (0, 1) and (1, t).
inline Curve<RatFunc> two_section_curve() { return Curve<RatFunc>(poly_rf({-2, 0, 1}), RatFunc(1)); }
inline std::vector<Point<RatFunc>> two_section_generators() {
  return {Point<RatFunc>(RatFunc(0), RatFunc(1)), Point<RatFunc>(RatFunc(1), RatFunc::t())};
}

inline Family standard_family() {
  return make_family("standard", RatFunc::t(), RatFunc(1), RatFunc(0), RatFunc(1));
}

/// n1 G1 + n2 G2 + ... with coefficients drawn from [-bound, bound].
template <class F>
Point<F> random_combination(const Curve<F>& c, const std::vector<Point<F>>& gens, int bound, std::mt19937& rng) {
  std::uniform_int_distribution<int> coeff(-bound, bound);
  Point<F> acc;
  for (const auto& g : gens) acc = group_add(c, acc, multiply(c, coeff(rng), g));
  return acc;
}

inline Rational random_rational(std::mt19937& rng, long bound = 9) {
  std::uniform_int_distribution<long> num(-bound, bound), den(1, bound);
  return Rational(num(rng), den(rng));
}

inline Poly random_poly(std::mt19937& rng, int max_degree = 3, long bound = 5) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  int d = deg(rng);
  std::vector<Rational> c;
  for (int k = 0; k <= d; ++k) c.push_back(random_rational(rng, bound));
  return Poly(c);
}

inline RatFunc random_ratfunc(std::mt19937& rng) {
  Poly den = random_poly(rng, 2);
  while (den.is_zero()) den = random_poly(rng, 2);
  return RatFunc::normalize(random_poly(rng, 3), den);
}

}  // namespace canheight::testing
