#include <gtest/gtest.h>

#include <random>

#include "canheight/family.hpp"
#include "canheight/weierstrass.hpp"
#include "support.hpp"

using namespace canheight;
using namespace canheight::testing;

TEST(Curve, NewExamples) {
  Curve<Rational> c(Rational(0), Rational(2));
  EXPECT_EQ(c.discriminant(), Rational(-1728));
  try {
    Curve<Rational>(Rational(-3), Rational(2));
    FAIL() << "singular curve accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_curve);
  }
  Curve<RatFunc> f(RatFunc::t(), RatFunc(1));
  EXPECT_EQ(f.discriminant(), poly_rf({-16 * 27, 0, 0, -64}));
}

TEST(GroupLaw, Examples) {
  Curve<Rational> c(Rational(0), Rational(1));
  auto p = qpt(2, 3);
  EXPECT_EQ(group_add(c, p, p), qpt(0, 1));
  EXPECT_EQ(group_add(c, p, Point<Rational>()), p);
  EXPECT_EQ(group_add(c, Point<Rational>(), p), p);
  EXPECT_TRUE(group_add(c, qpt(0, 1), qpt(0, -1)).is_infinity());
  EXPECT_TRUE(group_add(c, Point<Rational>(), Point<Rational>()).is_infinity());
}

TEST(GroupLaw, TwoTorsionDoublesToInfinity) {
  Curve<Rational> c(Rational(0), Rational(1));
  EXPECT_TRUE(double_point(c, qpt(-1, 0)).is_infinity());
}

TEST(Multiply, Examples) {
  Curve<Rational> c(Rational(0), Rational(1));
  auto p = qpt(0, 1);
  EXPECT_TRUE(multiply(c, 3, p).is_infinity());
  EXPECT_EQ(multiply(c, 2, p), qpt(0, -1));
  EXPECT_EQ(multiply(c, 1, p), p);
  EXPECT_TRUE(multiply(c, 0, p).is_infinity());
  EXPECT_EQ(multiply(c, -1, p), negate(p));

  Curve<RatFunc> f(RatFunc::t(), RatFunc(1));
  auto q = multiply(f, 2, Point<RatFunc>(RatFunc(0), RatFunc(1)));
  EXPECT_EQ(q.x(), RatFunc(Poly(std::vector<Rational>{Rational(0), Rational(0), Rational(1, 4)})));
  EXPECT_TRUE(f.contains(q));
}

TEST(Multiply, AdditiveInScalar) {
  std::mt19937 rng(21);
  for (const auto& s : sample_curves()) {
    for (int i = 0; i < 10; ++i) {
      std::uniform_int_distribution<int> d(-6, 6);
      int m = d(rng), n = d(rng);
      const auto& g = s.generators.front();
      EXPECT_EQ(multiply(s.curve, m + n, g), group_add(s.curve, multiply(s.curve, m, g), multiply(s.curve, n, g)));
    }
  }
}

TEST(Multiply, PowersOfTwoMatchRepeatedDoubling) {
  auto s = sample_curves().front();
  Point<Rational> acc = s.generators.front();
  for (int m = 1; m <= 4; ++m) {
    acc = group_add(s.curve, acc, acc);
    EXPECT_EQ(multiply(s.curve, 1L << m, s.generators.front()), acc);
  }
}

TEST(Torsion, OverQ) {
  Curve<Rational> c(Rational(0), Rational(1));
  EXPECT_EQ(torsion_order(c, qpt(2, 3)), 6);
  EXPECT_EQ(torsion_order(c, Point<Rational>()), 1);
  EXPECT_EQ(torsion_order(c, qpt(0, 1)), 3);
  EXPECT_EQ(torsion_order(c, qpt(-1, 0)), 2);
  EXPECT_FALSE(torsion_order(Curve<Rational>(Rational(0), Rational(2)), qpt(-1, 1)));
}

TEST(Torsion, OverFunctionField) {
  auto three = load_family(family_path("three_torsion"));
  EXPECT_EQ(torsion_order(three.curve, three.section), 3);
  EXPECT_TRUE(multiply(three.curve, 3, three.section).is_infinity());
  auto two = load_family(family_path("two_torsion"));
  EXPECT_EQ(torsion_order(two.curve, two.section), 2);
  auto std_fam = standard_family();
  EXPECT_FALSE(torsion_order(std_fam.curve, std_fam.section));
  auto iso = load_family(family_path("isotrivial"));
  try {
    torsion_order(iso.curve, iso.section);
    FAIL() << "isotrivial family not refused";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::isotrivial_family);
  }
}

TEST(GroupLaw, RandomPropertiesOverQ) {
  std::mt19937 rng(1);
  for (const auto& s : sample_curves()) {
    for (int i = 0; i < 40; ++i) {
      auto p = random_combination(s.curve, s.generators, 3, rng);
      auto q = random_combination(s.curve, s.generators, 3, rng);
      auto r = random_combination(s.curve, s.generators, 3, rng);
      auto pq = group_add(s.curve, p, q);
      EXPECT_TRUE(s.curve.contains(pq));
      EXPECT_EQ(pq, group_add(s.curve, q, p));
      EXPECT_EQ(group_add(s.curve, pq, r), group_add(s.curve, p, group_add(s.curve, q, r)));
    }
  }
}

TEST(GroupLaw, RandomPropertiesOverFunctionField) {
  std::mt19937 rng(2);
  auto c = two_section_curve();
  auto gens = two_section_generators();
  for (const auto& g : gens) ASSERT_TRUE(c.contains(g));
  for (int i = 0; i < 10; ++i) {
    auto p = random_combination(c, gens, 1, rng);
    auto q = random_combination(c, gens, 1, rng);
    auto r = random_combination(c, gens, 1, rng);
    auto pq = group_add(c, p, q);
    EXPECT_TRUE(c.contains(pq));
    EXPECT_EQ(pq, group_add(c, q, p));
    EXPECT_EQ(group_add(c, pq, r), group_add(c, p, group_add(c, q, r)));
  }
}

TEST(GroupLaw, SpecializationCommutes) {
  auto fam = standard_family();
  for (long t = -3; t <= 3; ++t) {
    Rational t0(t);
    Curve<Rational> fiber(fam.curve.a().evaluate(t0), fam.curve.b().evaluate(t0));
    Point<Rational> p(fam.section.x().evaluate(t0), fam.section.y().evaluate(t0));
    for (int n = 1; n <= 5; ++n) {
      auto generic = multiply(fam.curve, n, fam.section);
      auto special = multiply(fiber, n, p);
      try {
        Point<Rational> evaluated(generic.x().evaluate(t0), generic.y().evaluate(t0));
        EXPECT_EQ(evaluated, special) << "t0=" << t << " n=" << n;
      } catch (const PoleError&) {
        EXPECT_TRUE(special.is_infinity()) << "t0=" << t << " n=" << n;
      }
    }
  }
}

TEST(Family, LoaderValidates) {
  auto fam = load_family(family_path("standard"));
  EXPECT_EQ(fam.curve.a(), RatFunc::t());
  EXPECT_FALSE(fam.is_constant());
  EXPECT_TRUE(load_family(family_path("mordell_1")).is_constant());

  auto bad = nlohmann::json::parse(R"({"a": ["0","1"], "b": ["1"], "Px": ["0"], "Py": ["2"]})");
  try {
    family_from_json(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_on_curve);
  }
  EXPECT_THROW(family_from_json(nlohmann::json::parse(R"({"a": ["0"]})")), Error);
  EXPECT_THROW(load_family("/nonexistent/family.json"), Error);
  auto round = family_from_json(family_to_json(fam));
  EXPECT_EQ(round.curve, fam.curve);
  EXPECT_EQ(round.section, fam.section);
}
