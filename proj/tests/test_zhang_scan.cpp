#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "canheight/zhang_scan.hpp"
#include "support.hpp"

using namespace canheight;
using namespace canheight::testing;

TEST(Enumerate, SmallBounds) {
  auto e0 = enumerate_parameters(0.0);
  ASSERT_EQ(e0.size(), 3u);
  EXPECT_EQ(e0[0], Rational(0));
  EXPECT_EQ(e0[1], Rational(1));
  EXPECT_EQ(e0[2], Rational(-1));
  auto e2 = enumerate_parameters(std::log(2.0));
  std::vector<Rational> expected{0, 1, -1, Rational(1, 2), Rational(-1, 2), 2, -2};
  EXPECT_EQ(e2, expected);
}

TEST(Enumerate, GoldenCountAtLogTen) {
  // brute force over all p/q with |p|, q <= 10, deduplicated after reduction
  std::set<Rational> brute;
  for (long p = -10; p <= 10; ++p) {
    for (long q = 1; q <= 10; ++q) brute.insert(Rational(p, q));
  }
  auto e = enumerate_parameters(std::log(10.0));
  EXPECT_EQ(e.size(), brute.size());
  EXPECT_EQ(e.size(), 127u);
  EXPECT_EQ(std::set<Rational>(e.begin(), e.end()), brute);
}

TEST(Enumerate, SymmetricAndDuplicateFree) {
  auto e = enumerate_parameters(std::log(7.0));
  std::set<Rational> s(e.begin(), e.end());
  EXPECT_EQ(s.size(), e.size());
  for (const auto& x : e) {
    EXPECT_TRUE(s.count(-x));
    if (!x.is_zero()) EXPECT_TRUE(s.count(x.inverse()));
    EXPECT_LE(weil_height_q(x), std::log(7.0) + 1e-12);
  }
  for (std::size_t i = 1; i < e.size(); ++i) {
    EXPECT_LE(parameter_height(e[i - 1]), parameter_height(e[i]));
  }
  EXPECT_THROW(enumerate_parameters(-1.0), Error);
}

TEST(Census, StandardFamilySmallSetIsTorsionFibers) {
  auto fam = standard_family();
  ScanOptions opts;
  auto wide = small_height_census(fam, std::log(3.0), 10.0, opts);
  double smallest_positive = 1e9;
  for (const auto& m : wide.small_set) {
    if (m.hhat > 1e-6) smallest_positive = std::min(smallest_positive, m.hhat - m.error_bound);
  }
  auto rep = small_height_census(fam, std::log(3.0), smallest_positive / 2, opts);
  EXPECT_TRUE(rep.undecided.empty());
  std::set<Rational> members;
  for (const auto& m : rep.small_set) {
    members.insert(m.t0);
    EXPECT_EQ(m.hhat, 0.0);
    ASSERT_TRUE(m.torsion_order);
  }
  EXPECT_EQ(members, (std::set<Rational>{Rational(0), Rational(-2)}));
  EXPECT_EQ(rep.census_size, 15u);
}

TEST(Census, EpsilonZeroAndNegative) {
  auto fam = standard_family();
  auto at_zero = small_height_census(fam, std::log(2.0), 0.0, ScanOptions{});
  EXPECT_EQ(at_zero.small_set.size(), 2u);
  auto below = small_height_census(fam, std::log(2.0), -1e-6, ScanOptions{});
  EXPECT_TRUE(below.small_set.empty());
}

TEST(Census, MonotoneInEpsilonAndB) {
  auto fam = standard_family();
  auto key = [](const ScanReport& r) {
    std::set<Rational> s;
    for (const auto& m : r.small_set) s.insert(m.t0);
    return s;
  };
  auto a = key(small_height_census(fam, std::log(2.0), 0.3, ScanOptions{}));
  auto b = key(small_height_census(fam, std::log(2.0), 0.8, ScanOptions{}));
  auto c = key(small_height_census(fam, std::log(3.0), 0.8, ScanOptions{}));
  EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  EXPECT_TRUE(std::includes(c.begin(), c.end(), b.begin(), b.end()));
  EXPECT_GT(b.size(), a.size());
}

TEST(Census, Guards) {
  try {
    small_height_census(load_family(family_path("isotrivial")), 0.0, 0.1, ScanOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::isotrivial_family);
  }
  for (const char* name : {"three_torsion", "two_torsion"}) {
    try {
      essential_minimum_estimate(load_family(family_path(name)), 0.0, ScanOptions{});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::torsion_section);
    }
  }
}

TEST(EssentialMinimum, TraceAndBounds) {
  auto fam = standard_family();
  auto [e1, trace] = essential_minimum_estimate(fam, std::log(3.0), ScanOptions{});
  ASSERT_EQ(trace.size(), 3u);
  EXPECT_EQ(trace[0].H, 1);
  EXPECT_EQ(trace[0].fibers, 3u);
  EXPECT_EQ(trace[2].fibers, 15u);
  EXPECT_GE(e1, 0.0);
  double max_h = 0;
  for (long p = -3; p <= 3; ++p) {
    for (long q = 1; q <= 3; ++q) {
      if (std::gcd(p, q) == 1) max_h = std::max(max_h, fiber_height(fam, Rational(p, q)).value);
    }
  }
  EXPECT_LE(e1, max_h);
  EXPECT_EQ(trace.back().inf, 0.0);
  EXPECT_EQ(trace.back().minimizers, 2u);
  EXPECT_EQ(e1, *trace.back().second_inf);
}

TEST(EssentialMinimum, FromSyntheticFibers) {
  auto fiber = [](long p, double v, double err) {
    ScanFiber f;
    f.t0 = Rational(p);
    f.estimate.value = v;
    f.estimate.error_bound = err;
    return f;
  };
  std::vector<ScanFiber> fibers{fiber(0, 0.0, 0.0), fiber(1, 0.3, 1e-6), fiber(-1, 0.2, 1e-6), fiber(2, 0.1, 1e-6)};
  auto [e1, trace] = essential_minimum_from(fibers, 2);
  EXPECT_DOUBLE_EQ(trace[0].second_inf.value(), 0.2);
  EXPECT_DOUBLE_EQ(e1, 0.1);
  EXPECT_EQ(trace[1].minimizers, 1u);
}

TEST(Sandwich, Arithmetic) {
  auto z = zhang_sandwich(0.0, 0.5);
  EXPECT_EQ(z.low, 0.0);
  EXPECT_EQ(z.high, 0.0);
  EXPECT_EQ(z.verdict, "undetermined");
  auto s = zhang_sandwich(0.3, 0.5);
  EXPECT_DOUBLE_EQ(s.low, 0.5 * 0.3 / 2);
  EXPECT_DOUBLE_EQ(s.high, 0.5 * 0.3);
  EXPECT_EQ(s.high, 2 * s.low);
  EXPECT_EQ(s.verdict, "consistent-with-big");
  try {
    zhang_sandwich(0.3, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::nonpositive_degree);
  }
  EXPECT_THROW(zhang_sandwich(0.3, -1.0), Error);
}

TEST(ZhangScan, StandardFamilyReport) {
  auto rep = zhang_scan(standard_family(), std::log(3.0), 0.1, ScanOptions{});
  EXPECT_EQ(rep.sandwich_high, 2 * rep.sandwich_low);
  ASSERT_TRUE(rep.degM_exact);
  EXPECT_EQ(*rep.degM_exact, Rational(1, 2));
  EXPECT_TRUE(rep.undecided.empty());
  EXPECT_EQ(rep.bigness_verdict, "consistent-with-big");
  EXPECT_GT(rep.sandwich_low, 0.0);
  for (const auto& m : rep.small_set) EXPECT_LE(m.hhat, rep.epsilon);
  auto j = scan_report_json(rep);
  for (const char* k : {"epsilon", "B", "small_set", "census_size", "e1_hat", "degM", "sandwich_low", "sandwich_high",
                        "bigness_verdict", "undecided", "e1_trace"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  std::string csv = small_set_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "set,t0,hhat,error_bound,torsion_order");
}
