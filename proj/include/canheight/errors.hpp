#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace canheight {

/// Machine-readable category carried by every library exception.
enum class ErrorKind {
  invalid_input,
  zero_denominator,
  pole,
  singular_curve,
  not_on_curve,
  bad_reduction,
  intermediate_pole,
  budget_exceeded,
  no_stabilization,
  isotrivial_family,
  torsion_section,
  nonpositive_degree,
  parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::zero_denominator: return "zero-denominator";
    case ErrorKind::pole: return "pole";
    case ErrorKind::singular_curve: return "singular-curve";
    case ErrorKind::not_on_curve: return "not-on-curve";
    case ErrorKind::bad_reduction: return "bad-reduction";
    case ErrorKind::intermediate_pole: return "intermediate-pole";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::no_stabilization: return "no-stabilization";
    case ErrorKind::isotrivial_family: return "isotrivial-family";
    case ErrorKind::torsion_section: return "torsion-section";
    case ErrorKind::nonpositive_degree: return "nonpositive-degree";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace canheight
