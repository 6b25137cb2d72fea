// canheight: batch runs over an elliptic family file.
//
//   canheight <command> --family FILE [options]
//
// Commands: height, ffheight, specialize, survey, census, sandwich, converge.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "canheight/run.hpp"

int main(int argc, char** argv) {
  using namespace canheight;
  CLI::App app{"Canonical heights on elliptic families over Q(t)"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string t0_text, format_text = "csv";
  std::optional<double> tol_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family_path, "family JSON file")->required();
    sub->add_option("--t0", t0_text, "parameter value p/q");
    sub->add_option("--B", cfg.B_text, "height bound: a real or log(N)");
    sub->add_option("--epsilon", cfg.epsilon, "census threshold");
    sub->add_option("--tol", tol_flag, "tail tolerance (default 1e-6, or $CANHEIGHT_TOL)");
    sub->add_option("--m-max", cfg.m_max, "doubling budget over Q")->capture_default_str();
    sub->add_option("--m-max-ff", cfg.m_max_ff, "doubling budget over Q(t)")->capture_default_str();
    sub->add_option("--out-dir", cfg.out_dir, "directory for output files")->capture_default_str();
    sub->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "worker threads (default: all cores)");
  };
  const char* help[] = {
      "canonical height of the family's point (over Q, over Q(t), or on the fiber at --t0)",
      "exact function-field height deg M",
      "fiber report at --t0: both routes and the exact trace comparison",
      "error-term survey over all t0 of height <= B",
      "small-height census at threshold --epsilon",
      "census, essential minimum and sandwich bounds",
      "convergence trace and Cauchy rate check",
  };
  int k = 0;
  for (auto c : {Command::height, Command::ffheight, Command::specialize, Command::survey, Command::census,
                 Command::sandwich, Command::converge}) {
    auto* sub = app.add_subcommand(std::string(to_string(c)), help[k++]);
    add_common(sub);
    sub->callback([&cfg, c] { cfg.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!t0_text.empty()) cfg.t0 = Rational::parse(t0_text);
  } catch (const Error& e) {
    detail::error_json(std::cerr, 1, ErrorKind::invalid_input, e.what());
    return 1;
  }
  if (tol_flag) {
    cfg.tol = *tol_flag;
    cfg.tol_source = "flag";
  }
  cfg.format = format_text == "json" ? Format::json : Format::csv;
  return run(cfg, std::cout, std::cerr);
}
