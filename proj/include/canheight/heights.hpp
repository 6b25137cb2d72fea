#pragma once

/**
 * @file heights.hpp
 * @brief Naive heights and the canonical height as a limit of rescaled
 *        naive heights of doublings.
 *
 * Normalization: every canonical height in this library is
 *
 *     hhat(P) = lim_{m -> inf} 4^{-m} h(x([2^m]P)),
 *
 * i.e. relative to the degree-2 divisor 2(O) through the x-coordinate, with no
 * factor 1/2. Over Q, h(p/q) = log max(|p|, |q|); over Q(t), h(f/g) =
 * max(deg f, deg g).
 *
 * The sequence a_m = 4^{-m} h(x([2^m]P)) is Cauchy with
 * |a_{m+1} - a_m| <= C 4^{-m}, so after the last computed difference index m
 * the remaining tail is at most C 4^{-m} / (4 - 1). The decay constant C is
 * re-fitted from all differences seen so far.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "canheight/doubling.hpp"
#include "canheight/errors.hpp"
#include "canheight/format.hpp"
#include "canheight/rational.hpp"
#include "canheight/ratfunc.hpp"
#include "canheight/weierstrass.hpp"

namespace canheight {

inline constexpr double kDefaultTol = 1e-6;
inline constexpr int kDefaultMaxDoublingsQ = 12;
inline constexpr int kDefaultMaxDoublingsFF = 6;
inline constexpr double kDoublingScale = 4.0;

/// log max(|p|, |q|) for x = p/q in lowest terms.
inline double weil_height_q(const Rational& x) {
  const Integer& p = x.num_ref();
  const Integer& q = x.den_ref();
  return log_abs(cmp_abs(p, q) > 0 ? p : q);
}

/// max(deg num, deg den).
inline std::size_t naive_height_ff(const RatFunc& x) {
  std::size_t dn = x.num().is_zero() ? 0 : x.num().degree().value();
  return std::max(dn, x.den().degree().value());
}

inline double naive_point_height(const Curve<Rational>&, const Point<Rational>& p) {
  return p.is_infinity() ? 0.0 : weil_height_q(p.x());
}

inline std::size_t naive_point_height(const Curve<RatFunc>&, const Point<RatFunc>& p) {
  return p.is_infinity() ? 0 : naive_height_ff(p.x());
}

struct TraceTerm {
  int m = 0;
  double value = 0.0;             // a_m
  std::optional<Rational> exact;  // a_m as a rational, over Q(t)
};

struct ConvergenceTrace {
  std::vector<TraceTerm> terms;
  double q = kDoublingScale;

  std::size_t size() const { return terms.size(); }
  double last() const { return terms.back().value; }

  /// |a_{m+1} - a_m| * q^m for m = 0 .. size-2.
  std::vector<double> scaled_differences() const {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < terms.size(); ++k) {
      out.push_back(std::fabs(terms[k + 1].value - terms[k].value) * std::pow(q, terms[k].m));
    }
    return out;
  }
};

struct HeightEstimate {
  double value = 0.0;
  ConvergenceTrace trace;
  double error_bound = 0.0;
  double decay_constant = 0.0;
  bool converged = false;  // error_bound < tol was reached within the budget

  int m_used() const { return trace.terms.empty() ? 0 : trace.terms.back().m; }
};

/// Carries the full trace of a sequence that showed no geometric decay.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(ConvergenceTrace trace)
      : Error(ErrorKind::budget_exceeded,
              "no geometric decay observed within " + std::to_string(trace.terms.back().m) + " doublings"),
        trace_(std::move(trace)) {}
  const ConvergenceTrace& trace() const { return trace_; }

 private:
  ConvergenceTrace trace_;
};

struct CauchyRate {
  double constant = 0.0;
  bool ok = false;
};

/// C = max_m |a_{m+1} - a_m| q^m; ok iff every such scaled difference is at
/// most twice the first one.
inline CauchyRate cauchy_rate_check(const ConvergenceTrace& trace) {
  if (trace.size() < 3) throw Error(ErrorKind::invalid_input, "cauchy_rate_check needs at least 3 trace terms");
  auto scaled = trace.scaled_differences();
  CauchyRate out;
  out.constant = *std::max_element(scaled.begin(), scaled.end());
  out.ok = std::all_of(scaled.begin(), scaled.end(), [&](double s) { return s <= 2.0 * scaled.front(); });
  return out;
}

struct HeightOptions {
  double tol = kDefaultTol;
  int m_max = kDefaultMaxDoublingsQ;
};

namespace detail {

/// Geometric tail bound after the terms recorded so far.
inline double tail_bound(const ConvergenceTrace& trace, double decay_constant) {
  int last_diff = trace.terms[trace.size() - 2].m;
  return decay_constant * std::pow(trace.q, -last_diff) / (trace.q - 1.0);
}

/// No blow-up: the newest scaled difference stays within twice the largest
/// earlier one.
inline bool decay_observed(const ConvergenceTrace& trace) {
  auto scaled = trace.scaled_differences();
  if (scaled.size() < 2) return true;
  double earlier = *std::max_element(scaled.begin(), scaled.end() - 1);
  return scaled.back() <= 2.0 * earlier;
}

/// Runs the stopping rule over a generator of a_m values. `next(m)` returns
/// a_m (as a real) and is called for m = 0, 1, ... in order.
template <class Next>
HeightEstimate limit_of(Next&& next, const HeightOptions& opts) {
  if (opts.m_max < 2) throw Error(ErrorKind::invalid_input, "m_max must be at least 2");
  if (!(opts.tol > 0)) throw Error(ErrorKind::invalid_input, "tol must be positive");
  HeightEstimate est;
  for (int m = 0; m <= opts.m_max; ++m) {
    est.trace.terms.push_back(next(m));
    if (m < 2) continue;
    auto scaled = est.trace.scaled_differences();
    est.decay_constant = *std::max_element(scaled.begin(), scaled.end());
    est.error_bound = tail_bound(est.trace, est.decay_constant);
    if (est.error_bound < opts.tol) {
      est.converged = true;
      break;
    }
  }
  if (!est.converged && !decay_observed(est.trace)) throw BudgetExceeded(est.trace);
  est.value = std::max(0.0, est.trace.last());
  return est;
}

}  // namespace detail

/// Canonical height over Q by the doubling limit.
inline HeightEstimate canonical_height(const Curve<Rational>& c, const Point<Rational>& p,
                                       const HeightOptions& opts = {}) {
  DoublingOrbit<Rational> orbit(c, p);
  return detail::limit_of(
      [&](int m) {
        if (m > 0) orbit.advance();
        return TraceTerm{m, orbit.naive_height() / std::pow(kDoublingScale, m), std::nullopt};
      },
      opts);
}

/// Canonical height over Q(t) as a real-valued limit of degree heights.
inline HeightEstimate canonical_height(const Curve<RatFunc>& c, const Point<RatFunc>& p,
                                       HeightOptions opts = {kDefaultTol, kDefaultMaxDoublingsFF}) {
  DoublingOrbit<RatFunc> orbit(c, p);
  return detail::limit_of(
      [&](int m) {
        if (m > 0) orbit.advance();
        auto deg = static_cast<long>(orbit.naive_height());
        Rational exact(Integer(deg), Integer(1) << (2 * m));
        return TraceTerm{m, exact.to_double(), exact};
      },
      opts);
}

/// Exact degree sequence deg_m = h(x([2^m]P)) for m = 0..m_max over Q(t).
inline std::vector<std::size_t> doubling_degrees(const Curve<RatFunc>& c, const Point<RatFunc>& p, int m_max) {
  DoublingOrbit<RatFunc> orbit(c, p);
  std::vector<std::size_t> out;
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) orbit.advance();
    out.push_back(orbit.naive_height());
  }
  return out;
}

/// Exact rational canonical height over Q(t).
///
/// a_m = deg_m / 4^m and d_m = a_{m+1} - a_m. The limit is declared at the
/// first m with d_{m+1} = d_m / 4 and d_{m+2} = d_{m+1} / 4 exactly, and
/// equals a_m + (4/3) d_m. Errors out when no such m exists within m_max.
inline Rational canonical_height_ff_exact(const Curve<RatFunc>& c, const Point<RatFunc>& p,
                                          int m_max = kDefaultMaxDoublingsFF) {
  if (is_isotrivial(c)) {
    throw Error(ErrorKind::isotrivial_family, "exact function-field height requires a non-isotrivial family");
  }
  auto degrees = doubling_degrees(c, p, m_max);
  std::vector<Rational> a;
  for (std::size_t m = 0; m < degrees.size(); ++m) {
    a.emplace_back(Integer(static_cast<unsigned long>(degrees[m])), Integer(1) << (2 * m));
  }
  const Rational quarter(1, 4);
  for (std::size_t m = 0; m + 3 < a.size(); ++m) {
    Rational d0 = a[m + 1] - a[m];
    Rational d1 = a[m + 2] - a[m + 1];
    Rational d2 = a[m + 3] - a[m + 2];
    if (d1 == d0 * quarter && d2 == d1 * quarter) return a[m] + d0 * Rational(4, 3);
  }
  throw Error(ErrorKind::no_stabilization,
              "degree differences did not become exactly geometric within " + std::to_string(m_max) + " doublings");
}

/// CSV with columns m, a_m, diff_scaled (= |a_{m+1} - a_m| 4^m; empty on the
/// last row).
inline std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::ostringstream os;
  os << "m,a_m,diff_scaled\n";
  auto scaled = trace.scaled_differences();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    os << trace.terms[k].m << ',' << format_real(trace.terms[k].value) << ',';
    if (k < scaled.size()) os << format_real(scaled[k]);
    os << '\n';
  }
  return os.str();
}

}  // namespace canheight
