#pragma once

// Batch runs behind the command-line tool. run() never throws: it writes the
// artifacts, prints a one-line result on `out` and returns
//   0 success, 1 invalid configuration, 2 bad family file, 3 computation error,
// with a JSON error object on `err` for nonzero codes.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "canheight/errors.hpp"
#include "canheight/family.hpp"
#include "canheight/format.hpp"
#include "canheight/heights.hpp"
#include "canheight/parallel.hpp"
#include "canheight/specialization.hpp"
#include "canheight/weierstrass.hpp"
#include "canheight/zhang_scan.hpp"

#ifndef CANHEIGHT_VERSION
#define CANHEIGHT_VERSION "0.1.0"
#endif

namespace canheight {

inline constexpr const char* kVersion = CANHEIGHT_VERSION;
inline constexpr const char* kNormalization =
    "hhat(P) = lim 4^-m h(x([2^m]P)) relative to the divisor 2(O), no factor 1/2; "
    "h(p/q) = log max(|p|,|q|) over Q, max(deg p, deg q) over Q(t)";
inline constexpr const char* kTolEnv = "CANHEIGHT_TOL";

enum class Command { height, ffheight, specialize, survey, census, sandwich, converge };
enum class Format { csv, json };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::height: return "height";
    case Command::ffheight: return "ffheight";
    case Command::specialize: return "specialize";
    case Command::survey: return "survey";
    case Command::census: return "census";
    case Command::sandwich: return "sandwich";
    case Command::converge: return "converge";
  }
  return "unknown";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (auto c : {Command::height, Command::ffheight, Command::specialize, Command::survey, Command::census,
                 Command::sandwich, Command::converge}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(ErrorKind::invalid_input, msg) {}
};

/// Parses a height bound: a nonnegative real, or "log(N)" / "log N".
inline double parse_height_bound(const std::string& text) {
  static const std::regex log_form(R"(\s*log\s*\(?\s*([0-9]+(?:\.[0-9]*)?)\s*\)?\s*)");
  std::smatch m;
  double value;
  try {
    if (std::regex_match(text, m, log_form)) {
      value = std::log(std::stod(m[1].str()));
    } else {
      std::size_t used = 0;
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse height bound '" + text + "'");
  }
  if (!(value >= 0)) throw ConfigError("height bound must be nonnegative, got '" + text + "'");
  return value;
}

struct RunConfig {
  std::string family_path;
  Command command = Command::height;
  std::optional<Rational> t0;
  std::optional<std::string> B_text;
  std::optional<double> epsilon;
  double tol = kDefaultTol;
  std::string tol_source = "default";
  int m_max = kDefaultMaxDoublingsQ;
  int m_max_ff = kDefaultMaxDoublingsFF;
  std::string out_dir = ".";
  Format format = Format::csv;
  unsigned jobs = default_jobs();

  double B() const { return parse_height_bound(*B_text); }

  /// Picks up CANHEIGHT_TOL when the caller did not set tol explicitly.
  void apply_environment() {
    if (tol_source != "default") return;
    if (const char* env = std::getenv(kTolEnv)) {
      try {
        tol = std::stod(env);
      } catch (const std::logic_error&) {
        throw ConfigError(std::string(kTolEnv) + " is not a number: '" + env + "'");
      }
      tol_source = std::string("env ") + kTolEnv;
    }
  }

  void validate() const {
    if (family_path.empty()) throw ConfigError("--family is required");
    if (!(tol > 0)) throw ConfigError("tol must be positive");
    if (m_max < 2) throw ConfigError("--m-max must be at least 2");
    if (m_max_ff < 2) throw ConfigError("--m-max-ff must be at least 2");
    if (jobs == 0) throw ConfigError("--jobs must be positive");
    if (command == Command::specialize && !t0) throw ConfigError("specialize requires --t0");
    bool needs_b = command == Command::survey || command == Command::census || command == Command::sandwich;
    if (needs_b && !B_text) throw ConfigError(std::string(to_string(command)) + " requires --B");
    if (B_text) B();
    if (command == Command::census && !epsilon) throw ConfigError("census requires --epsilon");
  }

  /// Everything that determines the output; jobs and out_dir are left out so
  /// results do not depend on them.
  nlohmann::json echo() const {
    nlohmann::json j;
    j["command"] = std::string(to_string(command));
    j["family"] = family_path;
    j["t0"] = t0 ? nlohmann::json(t0->to_string()) : nlohmann::json(nullptr);
    j["B"] = B_text ? nlohmann::json(*B_text) : nlohmann::json(nullptr);
    j["epsilon"] = epsilon ? nlohmann::json(format_real(*epsilon)) : nlohmann::json(nullptr);
    j["tol"] = format_real(tol);
    j["tol_source"] = tol_source;
    j["m_max"] = m_max;
    j["m_max_ff"] = m_max_ff;
    j["format"] = format == Format::csv ? "csv" : "json";
    return j;
  }
};

namespace detail {

inline nlohmann::json header_json(const RunConfig& cfg) {
  return {{"tool", "canheight"}, {"version", kVersion}, {"normalization", kNormalization}, {"config", cfg.echo()}};
}

inline std::string csv_header(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# canheight " << kVersion << '\n';
  os << "# normalization: " << kNormalization << '\n';
  os << "# config: " << cfg.echo().dump() << '\n';
  return os.str();
}

class Artifacts {
 public:
  explicit Artifacts(const RunConfig& cfg) : cfg_(cfg) { std::filesystem::create_directories(cfg.out_dir); }

  void csv(const std::string& name, const std::string& body) const { write(name + ".csv", csv_header(cfg_) + body); }

  void json(const std::string& name, nlohmann::json body) const {
    nlohmann::json doc;
    doc["header"] = header_json(cfg_);
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(name + ".json", doc.dump(2) + "\n");
  }

 private:
  void write(const std::string& file, const std::string& text) const {
    auto path = std::filesystem::path(cfg_.out_dir) / file;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::invalid_input, "cannot write '" + path.string() + "'");
    os << text;
  }
  const RunConfig& cfg_;
};

inline nlohmann::json trace_json(const ConvergenceTrace& trace) {
  nlohmann::json rows = nlohmann::json::array();
  auto scaled = trace.scaled_differences();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    nlohmann::json row{{"m", trace.terms[k].m}, {"a_m", format_real(trace.terms[k].value)}};
    if (trace.terms[k].exact) row["a_m_exact"] = trace.terms[k].exact->to_string();
    row["diff_scaled"] = k < scaled.size() ? nlohmann::json(format_real(scaled[k])) : nlohmann::json(nullptr);
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json estimate_json(const HeightEstimate& e) {
  nlohmann::json j{{"value", format_real(e.value)},
                   {"error_bound", format_real(e.error_bound)},
                   {"decay_constant", format_real(e.decay_constant)},
                   {"converged", e.converged},
                   {"m_used", e.m_used()}};
  if (e.trace.size() >= 3) {
    auto rate = cauchy_rate_check(e.trace);
    j["cauchy_rate_ok"] = rate.ok;
  }
  return j;
}

inline std::string estimate_csv(const HeightEstimate& e) {
  std::ostringstream os;
  os << "value,error_bound,decay_constant,converged,m_used\n"
     << format_real(e.value) << ',' << format_real(e.error_bound) << ',' << format_real(e.decay_constant) << ','
     << (e.converged ? "true" : "false") << ',' << e.m_used() << '\n';
  return os.str();
}

inline void emit_estimate(const Artifacts& out, const RunConfig& cfg, const std::string& name, const HeightEstimate& e,
                          nlohmann::json extra = nlohmann::json::object()) {
  if (cfg.format == Format::csv) {
    out.csv(name, estimate_csv(e));
    out.csv(name + "_trace", trace_to_csv(e.trace));
  } else {
    nlohmann::json body = extra;
    body["estimate"] = estimate_json(e);
    body["trace"] = trace_json(e.trace);
    out.json(name, body);
  }
}

/// Height of the family's point: over Q for constant data, over Q(t)
/// otherwise, or on the fiber at --t0.
inline HeightEstimate point_height(const Family& fam, const RunConfig& cfg) {
  if (cfg.t0) return fiber_height(fam, *cfg.t0, HeightOptions{cfg.tol, cfg.m_max});
  if (fam.is_constant()) {
    return canonical_height(constant_curve(fam), constant_point(fam), HeightOptions{cfg.tol, cfg.m_max});
  }
  return canonical_height(fam.curve, fam.section, HeightOptions{cfg.tol, cfg.m_max_ff});
}

inline int run_command(const RunConfig& cfg, const Family& fam, std::ostream& out) {
  Artifacts files(cfg);
  switch (cfg.command) {
    case Command::height: {
      auto e = point_height(fam, cfg);
      emit_estimate(files, cfg, "height", e);
      out << format_real(e.value) << '\n';
      return 0;
    }
    case Command::converge: {
      auto e = point_height(fam, cfg);
      auto rate = cauchy_rate_check(e.trace);
      if (cfg.format == Format::csv) {
        files.csv("converge", trace_to_csv(e.trace));
      } else {
        files.json("converge", {{"trace", trace_json(e.trace)},
                                {"estimate", estimate_json(e)},
                                {"cauchy_constant", format_real(rate.constant)},
                                {"cauchy_ok", rate.ok}});
      }
      out << format_real(e.value) << " C=" << format_real(rate.constant) << " ok=" << (rate.ok ? "true" : "false")
          << '\n';
      return 0;
    }
    case Command::ffheight: {
      Rational exact = canonical_height_ff_exact(fam.curve, fam.section, cfg.m_max_ff);
      auto e = canonical_height(fam.curve, fam.section, HeightOptions{cfg.tol, cfg.m_max_ff});
      if (cfg.format == Format::csv) {
        std::ostringstream os;
        os << "exact,real,real_error_bound\n"
           << exact.to_string() << ',' << format_real(e.value) << ',' << format_real(e.error_bound) << '\n';
        files.csv("ffheight", os.str());
        files.csv("ffheight_trace", trace_to_csv(e.trace));
      } else {
        files.json("ffheight", {{"exact", exact.to_string()}, {"estimate", estimate_json(e)}, {"trace", trace_json(e.trace)}});
      }
      out << exact.to_string() << '\n';
      return 0;
    }
    case Command::specialize: {
      const Rational& t0 = *cfg.t0;
      Curve<Rational> c = specialize_curve(fam, t0);
      Point<Rational> p = specialize_point(fam, t0);
      auto fiber = fiber_height(fam, t0, HeightOptions{cfg.tol, cfg.m_max});
      nlohmann::json body{{"t0", t0.to_string()},
                          {"h_t", format_real(weil_height_q(t0))},
                          {"curve", {{"a", c.a().to_string()}, {"b", c.b().to_string()}}},
                          {"point", p.to_string()}};
      auto order = torsion_order(c, p);
      body["torsion_order"] = order ? nlohmann::json(*order) : nlohmann::json(nullptr);
      body["fiber"] = estimate_json(fiber);
      body["fiber_trace"] = trace_json(fiber.trace);
      try {
        SectionOrbit orbit(fam, cfg.m_max_ff);
        auto sec = section_route_height(orbit, t0, cfg.tol);
        auto cmp = compare_routes(fam, orbit, t0, static_cast<int>(sec.trace.size()));
        body["section_route"] = estimate_json(sec);
        body["section_trace"] = trace_json(sec.trace);
        body["terms_compared"] = cmp.terms_compared;
        body["terms_match"] = cmp.terms_match;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::intermediate_pole && e.kind() != ErrorKind::budget_exceeded) throw;
        body["section_route"] = {{"skipped", std::string(to_string(e.kind()))}, {"detail", e.what()}};
      }
      if (cfg.format == Format::csv) {
        std::ostringstream os;
        os << "t0,h_t,a,b,point,torsion_order,hhat_fiber,error_bound,m_used,hhat_section_route,terms_match\n";
        os << t0.to_string() << ',' << format_real(weil_height_q(t0)) << ',' << c.a().to_string() << ','
           << c.b().to_string() << ",\"" << p.to_string() << "\"," << (order ? std::to_string(*order) : "") << ','
           << format_real(fiber.value) << ',' << format_real(fiber.error_bound) << ',' << fiber.m_used() << ',';
        if (body["section_route"].contains("value")) {
          os << body["section_route"]["value"].get<std::string>() << ',' << (body["terms_match"].get<bool>() ? "true" : "false");
        } else {
          os << ',';
        }
        os << '\n';
        files.csv("specialize", os.str());
        files.csv("specialize_trace", trace_to_csv(fiber.trace));
      } else {
        files.json("specialize", body);
      }
      out << format_real(fiber.value) << '\n';
      return 0;
    }
    case Command::survey: {
      SurveyOptions opts{cfg.tol, cfg.m_max, cfg.m_max_ff, cfg.jobs};
      auto s = tate_error_survey(fam, enumerate_parameters(cfg.B()), opts);
      auto summary = survey_summary_json(s);
      if (cfg.format == Format::csv) {
        files.csv("survey", survey_to_csv(s));
        files.json("survey_summary", {{"summary", summary}});
      } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : s.records) {
          rows.push_back({{"t0", r.t0.to_string()},
                          {"h_t", format_real(r.h_t)},
                          {"hhat_fiber", format_real(r.hhat_fiber.value)},
                          {"hhat_section_route", format_real(r.hhat_section_route.value)},
                          {"route_gap", format_real(r.route_gap())},
                          {"error_term", format_real(r.error_term)},
                          {"m_used_fiber", r.hhat_fiber.m_used()},
                          {"m_used_section", r.hhat_section_route.m_used()},
                          {"terms_match", r.routes.terms_match}});
        }
        files.json("survey", {{"records", rows}, {"summary", summary}});
      }
      out << "records=" << s.records.size() << " skipped=" << s.skipped.size()
          << " max_abs_error=" << format_real(s.max_abs_error()) << '\n';
      return 0;
    }
    case Command::census:
    case Command::sandwich: {
      ScanOptions opts{cfg.tol, cfg.m_max, cfg.m_max_ff, cfg.jobs};
      double eps = cfg.epsilon.value_or(0.0);
      ScanReport rep;
      if (cfg.command == Command::census) {
        rep = small_height_census(fam, cfg.B(), eps, opts);
      } else {
        rep = zhang_scan(fam, cfg.B(), eps, opts);
      }
      const std::string name(to_string(cfg.command));
      files.json(name, {{"report", scan_report_json(rep)}});
      if (cfg.format == Format::csv) files.csv(name + "_small_set", small_set_csv(rep));
      if (cfg.command == Command::census) {
        out << "small=" << rep.small_set.size() << " undecided=" << rep.undecided.size()
            << " census_size=" << rep.census_size << '\n';
      } else {
        out << "e1_hat=" << format_real(rep.e1_hat) << " low=" << format_real(rep.sandwich_low)
            << " high=" << format_real(rep.sandwich_high) << " verdict=" << rep.bigness_verdict << '\n';
      }
      return 0;
    }
  }
  return 1;
}

inline void error_json(std::ostream& err, int code, ErrorKind kind, const std::string& message,
                       const ConvergenceTrace* trace = nullptr) {
  nlohmann::json j{{"error", std::string(to_string(kind))}, {"message", message}, {"exit_code", code}};
  if (trace) j["trace"] = trace_json(*trace);
  err << j.dump() << '\n';
}

}  // namespace detail

inline int run(RunConfig cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.apply_environment();
    cfg.validate();
  } catch (const Error& e) {
    detail::error_json(err, 1, e.kind(), e.what());
    return 1;
  }
  std::optional<Family> fam;
  try {
    fam = load_family(cfg.family_path);
  } catch (const Error& e) {
    detail::error_json(err, 2, e.kind(), e.what());
    return 2;
  }
  try {
    return detail::run_command(cfg, *fam, out);
  } catch (const BudgetExceeded& e) {
    detail::error_json(err, 3, e.kind(), e.what(), &e.trace());
  } catch (const Error& e) {
    detail::error_json(err, 3, e.kind(), e.what());
  } catch (const std::exception& e) {
    detail::error_json(err, 3, ErrorKind::invalid_input, e.what());
  }
  return 3;
}

}  // namespace canheight
