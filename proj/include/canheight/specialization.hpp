#pragma once

// Fibers of a family at rational parameters, and the two routes to the
// fiberwise canonical height:
//   fiber route    specialize E, P at t0, then double on the fiber over Q;
//   section route  double the section over Q(t), then evaluate x([2^m]P) at t0.
// At good parameters the two routes see the same x-coordinates, so their
// traces agree term by term.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "canheight/doubling.hpp"
#include "canheight/errors.hpp"
#include "canheight/family.hpp"
#include "canheight/format.hpp"
#include "canheight/heights.hpp"
#include "canheight/parallel.hpp"
#include "canheight/poly.hpp"
#include "canheight/ratfunc.hpp"
#include "canheight/weierstrass.hpp"
#include "canheight/zpoly.hpp"

namespace canheight {

// ---------------------------------------------------------------------------
// Rational roots

namespace detail {

/// Positive divisors of n != 0 by trial division. Throws when n carries a
/// composite cofactor above the trial bound.
inline std::vector<Integer> positive_divisors(Integer n) {
  n = abs(n);
  std::vector<std::pair<Integer, int>> factors;
  const unsigned long kTrialBound = 1000000;
  for (unsigned long d = 2; d <= kTrialBound && Integer(d) * d <= n; ++d) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
      int e = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
        mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
        ++e;
      }
      factors.emplace_back(Integer(d), e);
    }
  }
  if (n > 1) {
    if (Integer(kTrialBound) * kTrialBound < n && mpz_probab_prime_p(n.get_mpz_t(), 30) == 0) {
      throw Error(ErrorKind::invalid_input, "coefficient too hard to factor for the rational root search: " + n.get_str());
    }
    factors.emplace_back(n, 1);
  }
  std::vector<Integer> divisors{Integer(1)};
  for (const auto& [p, e] : factors) {
    std::size_t base = divisors.size();
    Integer pk(1);
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) divisors.push_back(divisors[i] * pk);
    }
  }
  std::sort(divisors.begin(), divisors.end());
  return divisors;
}

}  // namespace detail

/// All distinct rational roots of p (p != 0), ascending.
inline std::vector<Rational> rational_roots(const Poly& p) {
  if (p.is_zero()) throw Error(ErrorKind::invalid_input, "rational roots of the zero polynomial");
  std::vector<Rational> roots;
  Poly f = p;
  if (f.coeff(0).is_zero()) {
    roots.emplace_back(0);
    while (!f.is_zero() && f.coeff(0).is_zero()) f = exact_quotient(f, Poly::t());
  }
  if (f.is_constant()) return roots;
  auto ints = f.scaled_integer_coeffs(f.denominator_lcm());
  auto nums = detail::positive_divisors(ints.front());
  auto dens = detail::positive_divisors(ints.back());
  std::set<Rational> found;
  for (const auto& q : dens) {
    for (const auto& n : nums) {
      if (integer_gcd(n, q) != 1) continue;
      for (int s : {1, -1}) {
        Rational r(Integer(s * n), q);
        if (zpoly::eval_homogeneous(ints, r.num(), r.den(), ints.size() - 1) == 0) found.insert(r);
      }
    }
  }
  roots.insert(roots.end(), found.begin(), found.end());
  std::sort(roots.begin(), roots.end());
  return roots;
}

// ---------------------------------------------------------------------------
// Bad parameters and specialization

enum class BadCause { discriminant_root, coefficient_pole, section_pole };

inline std::string_view to_string(BadCause c) {
  switch (c) {
    case BadCause::discriminant_root: return "discriminant-root";
    case BadCause::coefficient_pole: return "coefficient-pole";
    case BadCause::section_pole: return "section-pole";
  }
  return "unknown";
}

class BadReduction : public Error {
 public:
  BadReduction(const Rational& t0, BadCause cause)
      : Error(ErrorKind::bad_reduction, "bad reduction at t = " + t0.to_string() + " (" +
                                            std::string(to_string(cause)) + ")"),
        t0_(t0),
        cause_(cause) {}
  const Rational& t0() const { return t0_; }
  BadCause cause() const { return cause_; }

 private:
  Rational t0_;
  BadCause cause_;
};

/// Every bad parameter with the first cause found (poles take precedence).
inline std::map<Rational, BadCause> bad_parameter_causes(const Family& fam) {
  std::map<Rational, BadCause> out;
  auto add = [&](const Poly& p, BadCause cause) {
    if (p.is_constant()) return;
    for (const auto& r : rational_roots(p)) out.emplace(r, cause);
  };
  add(fam.curve.a().den(), BadCause::coefficient_pole);
  add(fam.curve.b().den(), BadCause::coefficient_pole);
  if (!fam.section.is_infinity()) {
    add(fam.section.x().den(), BadCause::section_pole);
    add(fam.section.y().den(), BadCause::section_pole);
  }
  add(fam.curve.discriminant().num(), BadCause::discriminant_root);
  return out;
}

inline std::vector<Rational> bad_parameters(const Family& fam) {
  std::vector<Rational> out;
  for (const auto& [t, cause] : bad_parameter_causes(fam)) out.push_back(t);
  return out;
}

inline Curve<Rational> specialize_curve(const Family& fam, const Rational& t0) {
  Rational a, b;
  try {
    a = fam.curve.a().evaluate(t0);
    b = fam.curve.b().evaluate(t0);
  } catch (const PoleError&) {
    throw BadReduction(t0, BadCause::coefficient_pole);
  }
  Rational disc = Rational(4) * a * a * a + Rational(27) * b * b;
  if (disc.is_zero()) throw BadReduction(t0, BadCause::discriminant_root);
  return Curve<Rational>(a, b);
}

inline Point<Rational> specialize_point(const Family& fam, const Rational& t0) {
  specialize_curve(fam, t0);
  if (fam.section.is_infinity()) return {};
  try {
    return Point<Rational>(fam.section.x().evaluate(t0), fam.section.y().evaluate(t0));
  } catch (const PoleError&) {
    throw BadReduction(t0, BadCause::section_pole);
  }
}

/// Fiber route: canonical height of P_t0 on E_t0.
inline HeightEstimate fiber_height(const Family& fam, const Rational& t0, const HeightOptions& opts = {}) {
  return canonical_height(specialize_curve(fam, t0), specialize_point(fam, t0), opts);
}

// ---------------------------------------------------------------------------
// Section route

/// x([2^m]P) over Q(t) for m = 0..m_max as reduced integer polynomial pairs,
/// computed once and then shared read-only across fibers.
class SectionOrbit {
 public:
  struct Term {
    bool infinity = false;
    zpoly::ZPoly num, den;
    std::size_t homogeneous_degree = 0;
  };

  SectionOrbit(const Family& fam, int m_max) {
    if (m_max < 0) throw Error(ErrorKind::invalid_input, "m_max must be nonnegative");
    DoublingOrbit<RatFunc> orbit(fam.curve, fam.section);
    for (int m = 0; m <= m_max; ++m) {
      if (m > 0) orbit.advance();
      Term term;
      if (orbit.at_infinity()) {
        term.infinity = true;
      } else {
        auto [num, den] = orbit.reduced_x();
        term.homogeneous_degree = std::max(num.empty() ? 0 : num.size() - 1, den.size() - 1);
        term.num = std::move(num);
        term.den = std::move(den);
      }
      terms_.push_back(std::move(term));
    }
  }

  int m_max() const { return static_cast<int>(terms_.size()) - 1; }
  const Term& term(int m) const { return terms_.at(static_cast<std::size_t>(m)); }

  /// Exact x([2^m]P)(t0); nullopt when the section itself is at infinity.
  /// Throws intermediate-pole when t0 is a pole of x([2^m]P).
  std::optional<Rational> x_at(int m, const Rational& t0) const {
    const Term& tm = term(m);
    if (tm.infinity) return std::nullopt;
    Integer n = zpoly::eval_homogeneous(tm.num, t0.num(), t0.den(), tm.homogeneous_degree);
    Integer d = zpoly::eval_homogeneous(tm.den, t0.num(), t0.den(), tm.homogeneous_degree);
    if (d == 0) {
      throw Error(ErrorKind::intermediate_pole,
                  "t = " + t0.to_string() + " is a pole of x([2^" + std::to_string(m) + "]P)");
    }
    return Rational(n, d);
  }

 private:
  std::vector<Term> terms_;
};

/// Section route: a_m(t0) = 4^-m h(x([2^m]P)(t0)), m <= orbit.m_max().
inline HeightEstimate section_route_height(const SectionOrbit& orbit, const Rational& t0, double tol) {
  HeightOptions opts{tol, orbit.m_max()};
  return detail::limit_of(
      [&](int m) {
        auto x = orbit.x_at(m, t0);
        double h = x ? weil_height_q(*x) : 0.0;
        return TraceTerm{m, h / std::pow(kDoublingScale, m), std::nullopt};
      },
      opts);
}

inline HeightEstimate section_route_height(const Family& fam, const Rational& t0, double tol = kDefaultTol,
                                           int m_max = kDefaultMaxDoublingsFF) {
  specialize_point(fam, t0);
  return section_route_height(SectionOrbit(fam, m_max), t0, tol);
}

struct RouteComparison {
  int terms_compared = 0;
  bool terms_match = true;
};

/// Compares x([2^m]P_t0) on the fiber with x([2^m]P)(t0) exactly for the
/// first `count` doublings.
inline RouteComparison compare_routes(const Family& fam, const SectionOrbit& orbit, const Rational& t0, int count) {
  RouteComparison out;
  DoublingOrbit<Rational> fiber(specialize_curve(fam, t0), specialize_point(fam, t0));
  count = std::min(count, orbit.m_max() + 1);
  for (int m = 0; m < count; ++m) {
    if (m > 0) fiber.advance();
    auto sx = orbit.x_at(m, t0);
    bool same = fiber.at_infinity() ? !sx.has_value() : (sx.has_value() && *sx == fiber.x());
    out.terms_match = out.terms_match && same;
    ++out.terms_compared;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Survey

/// The function-field height deg M, exact when the degree differences
/// stabilize and otherwise the real estimate with its error bar.
struct DegreeM {
  std::optional<Rational> exact;
  double value = 0.0;
  double error_bound = 0.0;

  std::string to_string() const { return exact ? exact->to_string() : format_real(value); }
};

inline DegreeM degree_of_m(const Family& fam, int m_max = kDefaultMaxDoublingsFF, double tol = kDefaultTol) {
  DegreeM out;
  try {
    out.exact = canonical_height_ff_exact(fam.curve, fam.section, m_max);
    out.value = out.exact->to_double();
    return out;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::no_stabilization) throw;
  }
  auto est = canonical_height(fam.curve, fam.section, HeightOptions{tol, m_max});
  out.value = est.value;
  out.error_bound = est.error_bound;
  return out;
}

struct FiberRecord {
  Rational t0;
  double h_t = 0.0;
  HeightEstimate hhat_fiber;
  HeightEstimate hhat_section_route;
  double error_term = 0.0;
  double error_term_bound = 0.0;  // from fiber tail and any inexactness in deg M
  bool good_reduction = true;
  RouteComparison routes;

  double route_gap() const { return std::fabs(hhat_fiber.value - hhat_section_route.value); }
};

struct SkipRecord {
  Rational t0;
  ErrorKind reason = ErrorKind::bad_reduction;
  std::string detail;
};

struct SurveyOptions {
  double tol = kDefaultTol;
  int m_max = kDefaultMaxDoublingsQ;      // fiber route
  int m_max_ff = kDefaultMaxDoublingsFF;  // section route and deg M
  unsigned jobs = 1;
};

struct SurveyResult {
  DegreeM degM;
  std::vector<FiberRecord> records;
  std::vector<SkipRecord> skipped;
  std::vector<Rational> bad_parameters;

  double max_abs_error() const {
    double out = 0.0;
    for (const auto& r : records) out = std::max(out, std::fabs(r.error_term));
    return out;
  }
};

/// Order used for every per-parameter output: (H(t0), numerator, denominator)
/// with H = max(|p|, q), an exact proxy for the Weil height.
inline bool parameter_order(const Rational& a, const Rational& b) {
  auto height = [](const Rational& r) { return cmp_abs(r.num_ref(), r.den_ref()) > 0 ? Integer(abs(r.num_ref())) : r.den(); };
  Integer ha = height(a), hb = height(b);
  if (ha != hb) return ha < hb;
  if (a.num_ref() != b.num_ref()) return a.num_ref() < b.num_ref();
  return a.den_ref() < b.den_ref();
}

namespace detail {

inline void require_non_isotrivial(const Family& fam) {
  if (is_isotrivial(fam.curve)) {
    throw Error(ErrorKind::isotrivial_family, "family '" + fam.label + "' is isotrivial (j(t) is constant)");
  }
}

}  // namespace detail

/// Fiber and section routes at every parameter in `params`; bad parameters
/// and failing fibers become skip records.
inline SurveyResult tate_error_survey(const Family& fam, const std::vector<Rational>& params,
                                      const SurveyOptions& opts = {}) {
  detail::require_non_isotrivial(fam);
  SurveyResult out;
  out.degM = degree_of_m(fam, opts.m_max_ff, opts.tol);
  auto causes = bad_parameter_causes(fam);
  out.bad_parameters = bad_parameters(fam);
  const SectionOrbit orbit(fam, opts.m_max_ff);

  using Outcome = std::variant<std::monostate, FiberRecord, SkipRecord>;
  auto one = [&](const Rational& t0) -> Outcome {
    if (auto it = causes.find(t0); it != causes.end()) {
      return SkipRecord{t0, ErrorKind::bad_reduction, std::string(to_string(it->second))};
    }
    try {
      FiberRecord rec;
      rec.t0 = t0;
      rec.h_t = weil_height_q(t0);
      rec.hhat_fiber = fiber_height(fam, t0, HeightOptions{opts.tol, opts.m_max});
      rec.hhat_section_route = section_route_height(orbit, t0, opts.tol);
      rec.error_term = rec.hhat_fiber.value - out.degM.value * rec.h_t;
      rec.error_term_bound = rec.hhat_fiber.error_bound + out.degM.error_bound * rec.h_t;
      rec.routes = compare_routes(fam, orbit, t0, static_cast<int>(rec.hhat_section_route.trace.size()));
      return rec;
    } catch (const BadReduction& e) {
      return SkipRecord{t0, ErrorKind::bad_reduction, std::string(to_string(e.cause()))};
    } catch (const Error& e) {
      return SkipRecord{t0, e.kind(), e.what()};
    }
  };
  auto sorted = params;
  std::sort(sorted.begin(), sorted.end(), parameter_order);
  auto outcomes = parallel_map(sorted, one, opts.jobs);
  for (auto& o : outcomes) {
    if (auto* r = std::get_if<FiberRecord>(&o)) out.records.push_back(std::move(*r));
    if (auto* s = std::get_if<SkipRecord>(&o)) out.skipped.push_back(std::move(*s));
  }
  return out;
}

inline std::string survey_to_csv(const SurveyResult& s) {
  std::ostringstream os;
  os << "t0,h_t,hhat_fiber,hhat_section_route,route_gap,error_term,m_used_fiber,m_used_section\n";
  for (const auto& r : s.records) {
    os << r.t0.to_string() << ',' << format_real(r.h_t) << ',' << format_real(r.hhat_fiber.value) << ','
       << format_real(r.hhat_section_route.value) << ',' << format_real(r.route_gap()) << ','
       << format_real(r.error_term) << ',' << r.hhat_fiber.m_used() << ',' << r.hhat_section_route.m_used() << '\n';
  }
  return os.str();
}

inline nlohmann::json survey_summary_json(const SurveyResult& s) {
  nlohmann::json j;
  j["degM"] = s.degM.to_string();
  j["degM_exact"] = s.degM.exact.has_value();
  j["max_abs_error"] = format_real(s.max_abs_error());
  j["records"] = s.records.size();
  j["bad_parameters"] = nlohmann::json::array();
  for (const auto& t : s.bad_parameters) j["bad_parameters"].push_back(t.to_string());
  j["skipped"] = nlohmann::json::array();
  for (const auto& k : s.skipped) {
    j["skipped"].push_back({{"t0", k.t0.to_string()}, {"reason", std::string(to_string(k.reason))}, {"detail", k.detail}});
  }
  bool exact = true;
  for (const auto& r : s.records) exact = exact && r.routes.terms_match;
  j["routes_agree_termwise"] = exact;
  return j;
}

}  // namespace canheight
