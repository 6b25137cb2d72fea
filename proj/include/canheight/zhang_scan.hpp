#pragma once

// Bounded-height parameter scans: small-height censuses, the essential
// minimum estimate e1 and the sandwich
//
//     deg M * e1 >= Mbar^2 >= deg M * e1 / 2.
//
// Only Q-rational parameters are scanned.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "canheight/errors.hpp"
#include "canheight/family.hpp"
#include "canheight/format.hpp"
#include "canheight/heights.hpp"
#include "canheight/parallel.hpp"
#include "canheight/specialization.hpp"
#include "canheight/weierstrass.hpp"

namespace canheight {

/// Largest H with log H <= B (with a little slack so that B = log N lands on N).
inline long height_bound_from_log(double B) {
  if (!(B >= 0)) throw Error(ErrorKind::invalid_input, "height bound B must be nonnegative");
  double H = std::floor(std::exp(B) * (1.0 + 1e-12));
  if (H > 1e6) throw Error(ErrorKind::invalid_input, "height bound B too large for enumeration");
  return static_cast<long>(H);
}

/// All reduced p/q with max(|p|, q) <= H, sorted by (max(|p|,q), |p|, q),
/// positive before negative.
inline std::vector<Rational> enumerate_parameters_up_to(long H) {
  struct Key {
    long h, p, q;
    int sign;
  };
  std::vector<Key> keys;
  for (long q = 1; q <= H; ++q) {
    for (long p = 0; p <= H; ++p) {
      if (std::gcd(p, q) != 1) continue;
      long h = std::max(p, q);
      keys.push_back({h, p, q, 1});
      if (p != 0) keys.push_back({h, p, q, -1});
    }
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.h != b.h) return a.h < b.h;
    if (a.p != b.p) return a.p < b.p;
    if (a.q != b.q) return a.q < b.q;
    return a.sign > b.sign;
  });
  std::vector<Rational> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(Rational::from_coprime(Integer(k.sign * k.p), Integer(k.q)));
  return out;
}

/// Every rational of Weil height at most B.
inline std::vector<Rational> enumerate_parameters(double B) { return enumerate_parameters_up_to(height_bound_from_log(B)); }

inline long parameter_height(const Rational& t) {
  return std::max(std::labs(t.num_ref().get_si()), t.den_ref().get_si());
}

// ---------------------------------------------------------------------------

struct ScanOptions {
  double tol = kDefaultTol;
  int m_max = kDefaultMaxDoublingsQ;
  int m_max_ff = kDefaultMaxDoublingsFF;
  unsigned jobs = 1;
};

/// One fiber height, kept with the tolerance that produced it.
struct ScanFiber {
  Rational t0;
  HeightEstimate estimate;
  double tol_used = 0.0;
};

struct ScanSkip {
  Rational t0;
  ErrorKind reason = ErrorKind::bad_reduction;
  std::string detail;
};

struct SmallMember {
  Rational t0;
  double hhat = 0.0;
  double error_bound = 0.0;
  std::optional<int> torsion_order;
};

struct E1Tier {
  long H = 0;  // tier B' = log H
  std::size_t fibers = 0;
  double inf = 0.0;
  std::size_t minimizers = 0;
  std::optional<double> second_inf;
};

struct ScanReport {
  std::string family;
  double epsilon = 0.0;
  double B = 0.0;
  std::vector<SmallMember> small_set;
  std::vector<SmallMember> undecided;
  std::size_t census_size = 0;  // good fibers examined
  std::vector<ScanSkip> skipped;
  double e1_hat = 0.0;
  std::vector<E1Tier> e1_trace;
  double degM = 0.0;
  std::optional<Rational> degM_exact;
  double sandwich_low = 0.0;
  double sandwich_high = 0.0;
  std::string bigness_verdict = "undetermined";
};

namespace detail {

/// Refuses isotrivial families and torsion sections.
inline void require_scan_hypotheses(const Family& fam) {
  require_non_isotrivial(fam);
  if (auto n = torsion_order(fam.curve, fam.section)) {
    throw Error(ErrorKind::torsion_section,
                "section of family '" + fam.label + "' is torsion of order " + std::to_string(*n));
  }
}

inline std::vector<std::variant<std::monostate, ScanFiber, ScanSkip>> scan_fibers(
    const Family& fam, const std::vector<Rational>& params, const ScanOptions& opts) {
  auto causes = bad_parameter_causes(fam);
  auto one = [&](const Rational& t0) -> std::variant<std::monostate, ScanFiber, ScanSkip> {
    if (auto it = causes.find(t0); it != causes.end()) {
      return ScanSkip{t0, ErrorKind::bad_reduction, std::string(to_string(it->second))};
    }
    try {
      return ScanFiber{t0, fiber_height(fam, t0, HeightOptions{opts.tol, opts.m_max}), opts.tol};
    } catch (const BadReduction& e) {
      return ScanSkip{t0, ErrorKind::bad_reduction, std::string(to_string(e.cause()))};
    } catch (const Error& e) {
      return ScanSkip{t0, e.kind(), e.what()};
    }
  };
  return parallel_map(params, one, opts.jobs);
}

enum class Membership { in, out, undecided };

inline Membership classify(const HeightEstimate& e, double epsilon) {
  if (e.value + e.error_bound <= epsilon) return Membership::in;
  if (e.value - e.error_bound > epsilon) return Membership::out;
  return Membership::undecided;
}

}  // namespace detail

/// Census of fibers with hhat <= epsilon among parameters of height <= B.
/// Borderline fibers are recomputed at tol/16 and tol/256 before being set
/// aside as undecided. Fills the census fields and the fiber list used by the
/// essential minimum.
inline ScanReport small_height_census(const Family& fam, double B, double epsilon, const ScanOptions& opts,
                                      std::vector<ScanFiber>* fibers_out = nullptr) {
  detail::require_scan_hypotheses(fam);
  ScanReport rep;
  rep.family = fam.label;
  rep.epsilon = epsilon;
  rep.B = B;
  auto params = enumerate_parameters(B);
  std::vector<ScanFiber> fibers;
  for (auto& o : detail::scan_fibers(fam, params, opts)) {
    if (auto* f = std::get_if<ScanFiber>(&o)) fibers.push_back(std::move(*f));
    if (auto* s = std::get_if<ScanSkip>(&o)) rep.skipped.push_back(std::move(*s));
  }
  rep.census_size = fibers.size();

  // Escalation ladder for borderline fibers.
  std::vector<std::size_t> borderline;
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    if (detail::classify(fibers[i].estimate, epsilon) == detail::Membership::undecided) borderline.push_back(i);
  }
  for (double factor : {16.0, 256.0}) {
    if (borderline.empty()) break;
    ScanOptions tighter = opts;
    tighter.tol = opts.tol / factor;
    auto rerun = parallel_map(
        borderline,
        [&](std::size_t i) -> std::optional<HeightEstimate> {
          try {
            return fiber_height(fam, fibers[i].t0, HeightOptions{tighter.tol, tighter.m_max});
          } catch (const Error&) {
            return std::nullopt;
          }
        },
        opts.jobs);
    std::vector<std::size_t> still;
    for (std::size_t k = 0; k < borderline.size(); ++k) {
      std::size_t i = borderline[k];
      if (rerun[k]) {
        fibers[i].estimate = *rerun[k];
        fibers[i].tol_used = tighter.tol;
      }
      if (detail::classify(fibers[i].estimate, epsilon) == detail::Membership::undecided) still.push_back(i);
    }
    borderline = std::move(still);
  }

  for (const auto& f : fibers) {
    auto m = detail::classify(f.estimate, epsilon);
    if (m == detail::Membership::out) continue;
    SmallMember s{f.t0, f.estimate.value, f.estimate.error_bound,
                  torsion_order(specialize_curve(fam, f.t0), specialize_point(fam, f.t0))};
    (m == detail::Membership::in ? rep.small_set : rep.undecided).push_back(std::move(s));
  }
  if (fibers_out) *fibers_out = std::move(fibers);
  return rep;
}

/// e1 estimate from scanned fibers: at each tier H' <= H take the inf, drop
/// the minimizers (fibers whose interval reaches down to the inf) and take
/// the inf of the rest. e1_hat is the second inf at the top tier.
inline std::pair<double, std::vector<E1Tier>> essential_minimum_from(const std::vector<ScanFiber>& fibers, long H) {
  std::vector<E1Tier> trace;
  for (long h = 1; h <= H; ++h) {
    E1Tier tier;
    tier.H = h;
    std::vector<const ScanFiber*> in_tier;
    for (const auto& f : fibers) {
      if (parameter_height(f.t0) <= h) in_tier.push_back(&f);
    }
    tier.fibers = in_tier.size();
    if (in_tier.empty()) {
      trace.push_back(tier);
      continue;
    }
    double inf = in_tier.front()->estimate.value;
    double inf_err = in_tier.front()->estimate.error_bound;
    for (const auto* f : in_tier) {
      if (f->estimate.value < inf) {
        inf = f->estimate.value;
        inf_err = f->estimate.error_bound;
      }
    }
    tier.inf = inf;
    for (const auto* f : in_tier) {
      if (f->estimate.value - f->estimate.error_bound <= inf + inf_err) {
        ++tier.minimizers;
      } else if (!tier.second_inf || f->estimate.value < *tier.second_inf) {
        tier.second_inf = f->estimate.value;
      }
    }
    trace.push_back(tier);
  }
  double e1 = 0.0;
  if (!trace.empty()) e1 = trace.back().second_inf.value_or(trace.back().inf);
  return {std::max(0.0, e1), trace};
}

inline std::pair<double, std::vector<E1Tier>> essential_minimum_estimate(const Family& fam, double B,
                                                                         const ScanOptions& opts) {
  detail::require_scan_hypotheses(fam);
  std::vector<ScanFiber> fibers;
  for (auto& o : detail::scan_fibers(fam, enumerate_parameters(B), opts)) {
    if (auto* f = std::get_if<ScanFiber>(&o)) fibers.push_back(std::move(*f));
  }
  return essential_minimum_from(fibers, height_bound_from_log(B));
}

struct Sandwich {
  double low = 0.0;
  double high = 0.0;
  std::string verdict;
};

/// Bounds deg M * e1 / 2 <= Mbar^2 <= deg M * e1.
inline Sandwich zhang_sandwich(double e1_hat, double degM) {
  if (!(degM > 0)) {
    throw Error(ErrorKind::nonpositive_degree,
                "deg M = " + format_real(degM) + " is not positive; the section has zero height");
  }
  Sandwich s;
  s.high = degM * std::max(0.0, e1_hat);
  s.low = s.high / 2;
  s.verdict = s.low > 0 ? "consistent-with-big" : "undetermined";
  return s;
}

/// Census, essential minimum and sandwich in one pass over the fibers.
inline ScanReport zhang_scan(const Family& fam, double B, double epsilon, const ScanOptions& opts) {
  std::vector<ScanFiber> fibers;
  ScanReport rep = small_height_census(fam, B, epsilon, opts, &fibers);
  auto [e1, trace] = essential_minimum_from(fibers, height_bound_from_log(B));
  rep.e1_hat = e1;
  rep.e1_trace = std::move(trace);
  DegreeM d = degree_of_m(fam, opts.m_max_ff, opts.tol);
  rep.degM = d.value;
  rep.degM_exact = d.exact;
  Sandwich s = zhang_sandwich(rep.e1_hat, rep.degM);
  rep.sandwich_low = s.low;
  rep.sandwich_high = s.high;
  rep.bigness_verdict = rep.undecided.empty() ? s.verdict : "undetermined";
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json member_json(const SmallMember& s) {
  nlohmann::json j{{"t0", s.t0.to_string()}, {"hhat", format_real(s.hhat)}, {"error_bound", format_real(s.error_bound)}};
  j["torsion_order"] = s.torsion_order ? nlohmann::json(*s.torsion_order) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json scan_report_json(const ScanReport& r) {
  nlohmann::json j;
  j["family"] = r.family;
  j["epsilon"] = format_real(r.epsilon);
  j["B"] = format_real(r.B);
  j["small_set"] = nlohmann::json::array();
  for (const auto& s : r.small_set) j["small_set"].push_back(member_json(s));
  j["undecided"] = nlohmann::json::array();
  for (const auto& s : r.undecided) j["undecided"].push_back(member_json(s));
  j["census_size"] = r.census_size;
  j["skipped"] = nlohmann::json::array();
  for (const auto& s : r.skipped) {
    j["skipped"].push_back({{"t0", s.t0.to_string()}, {"reason", std::string(to_string(s.reason))}, {"detail", s.detail}});
  }
  j["e1_hat"] = format_real(r.e1_hat);
  j["e1_trace"] = nlohmann::json::array();
  for (const auto& t : r.e1_trace) {
    j["e1_trace"].push_back({{"B", format_real(std::log(static_cast<double>(t.H)))},
                             {"H", t.H},
                             {"fibers", t.fibers},
                             {"inf", format_real(t.inf)},
                             {"minimizers", t.minimizers},
                             {"second_inf", t.second_inf ? nlohmann::json(format_real(*t.second_inf)) : nlohmann::json(nullptr)}});
  }
  j["degM"] = r.degM_exact ? r.degM_exact->to_string() : format_real(r.degM);
  j["sandwich_low"] = format_real(r.sandwich_low);
  j["sandwich_high"] = format_real(r.sandwich_high);
  j["bigness_verdict"] = r.bigness_verdict;
  return j;
}

/// CSV of the small set followed by the undecided annex, tagged per row.
inline std::string small_set_csv(const ScanReport& r) {
  std::ostringstream os;
  os << "set,t0,hhat,error_bound,torsion_order\n";
  auto rows = [&](const char* tag, const std::vector<SmallMember>& v) {
    for (const auto& s : v) {
      os << tag << ',' << s.t0.to_string() << ',' << format_real(s.hhat) << ',' << format_real(s.error_bound) << ',';
      if (s.torsion_order) os << *s.torsion_order;
      os << '\n';
    }
  };
  rows("small", r.small_set);
  rows("undecided", r.undecided);
  return os.str();
}

}  // namespace canheight
