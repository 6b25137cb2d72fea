#pragma once

// An elliptic fibration over the t-line together with a section:
// y^2 = x^3 + a(t) x + b(t) and P = (x(t), y(t)) in E(Q(t)).

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "canheight/errors.hpp"
#include "canheight/ratfunc.hpp"
#include "canheight/weierstrass.hpp"

namespace canheight {

struct Family {
  std::string label;
  Curve<RatFunc> curve;
  Point<RatFunc> section;

  bool is_constant() const {
    return curve.a().is_constant() && curve.b().is_constant() &&
           (section.is_infinity() || (section.x().is_constant() && section.y().is_constant()));
  }
};

/// Validates nonsingularity and the on-curve identity exactly.
inline Family make_family(std::string label, RatFunc a, RatFunc b, RatFunc px, RatFunc py) {
  Curve<RatFunc> curve(std::move(a), std::move(b));
  Point<RatFunc> section(std::move(px), std::move(py));
  if (!curve.contains(section)) {
    throw Error(ErrorKind::not_on_curve,
                "section " + section.to_string() + " does not satisfy " + curve.to_string());
  }
  return Family{std::move(label), std::move(curve), std::move(section)};
}

/// The curve over Q of a family whose data are all constant.
inline Curve<Rational> constant_curve(const Family& fam) {
  return Curve<Rational>(fam.curve.a().evaluate(Rational()), fam.curve.b().evaluate(Rational()));
}
inline Point<Rational> constant_point(const Family& fam) {
  if (fam.section.is_infinity()) return {};
  return Point<Rational>(fam.section.x().evaluate(Rational()), fam.section.y().evaluate(Rational()));
}

/// Schema: {"label": str, "a": ..., "b": ..., "Px": ..., "Py": ...} with each
/// coefficient a polynomial array or a {"num", "den"} rational function.
inline Family family_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse, "family file must hold a JSON object");
  for (const char* key : {"a", "b", "Px", "Py"}) {
    if (!j.contains(key)) throw Error(ErrorKind::parse, std::string("family is missing field '") + key + "'");
  }
  std::string label = j.value("label", std::string("unnamed"));
  return make_family(std::move(label), ratfunc_from_json(j.at("a")), ratfunc_from_json(j.at("b")),
                     ratfunc_from_json(j.at("Px")), ratfunc_from_json(j.at("Py")));
}

inline nlohmann::json family_to_json(const Family& fam) {
  nlohmann::json j;
  j["label"] = fam.label;
  to_json(j["a"], fam.curve.a());
  to_json(j["b"], fam.curve.b());
  to_json(j["Px"], fam.section.x());
  to_json(j["Py"], fam.section.y());
  return j;
}

inline Family load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open family file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "family file '" + path + "' is not valid JSON: " + e.what());
  }
  return family_from_json(j);
}

}  // namespace canheight
