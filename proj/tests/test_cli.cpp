#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "canheight/run.hpp"
#include "support.hpp"

using namespace canheight;
using canheight::testing::family_path;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("canheight_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

Result run_cfg(const RunConfig& cfg) {
  std::ostringstream out, err;
  int code = run(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig config(Command c, const std::string& family, const fs::path& out) {
  RunConfig cfg;
  cfg.command = c;
  cfg.family_path = family_path(family);
  cfg.out_dir = out.string();
  cfg.jobs = 2;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Every unquoted numeric field of a CSV data row is an exact integer/"p/q"
/// or a decimal with 12 significant digits.
void expect_csv_numbers_formatted(const std::string& csv) {
  static const std::regex decimal(R"(-?\d+\.\d+(e[+-]\d+)?)");
  static const std::regex exact(R"(-?\d+(/\d+)?)");
  static const std::regex word(R"([a-z][a-z_-]*)");
  std::istringstream lines(csv);
  std::string line;
  bool header_row = true;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header_row) {
      header_row = false;
      continue;
    }
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) {
      if (f.empty() || f[0] == '"' || f == "true" || f == "false" || f.back() == '"') continue;
      if (std::regex_match(f, exact) || std::regex_match(f, word)) continue;
      ASSERT_TRUE(std::regex_match(f, decimal)) << f;
      std::string digits;
      for (char ch : f.substr(0, f.find('e'))) {
        if (std::isdigit(static_cast<unsigned char>(ch))) digits += ch;
      }
      auto lead = digits.find_first_not_of('0');
      if (lead != std::string::npos) digits.erase(0, lead);
      EXPECT_EQ(digits.size(), 12u) << f;
    }
  }
}

}  // namespace

TEST(Cli, HeightOfTorsionPointIsZero) {
  auto dir = scratch("height");
  auto r = run_cfg(config(Command::height, "mordell_1", dir));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0.00000000000\n");
  std::string csv = slurp(dir / "height.csv");
  EXPECT_EQ(csv.rfind("# canheight ", 0), 0u);
  EXPECT_NE(csv.find("# normalization: "), std::string::npos);
  EXPECT_NE(csv.find("2(O)"), std::string::npos);
  EXPECT_NE(csv.find("# config: "), std::string::npos);
  expect_csv_numbers_formatted(csv);
  expect_csv_numbers_formatted(slurp(dir / "height_trace.csv"));
}

TEST(Cli, SpecializeTorsionFiber) {
  auto dir = scratch("spec0");
  auto cfg = config(Command::specialize, "standard", dir);
  cfg.t0 = Rational(0);
  cfg.format = Format::json;
  auto r = run_cfg(cfg);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0.00000000000\n");
  auto j = nlohmann::json::parse(slurp(dir / "specialize.json"));
  EXPECT_EQ(j["fiber"]["value"], "0.00000000000");
  EXPECT_EQ(j["torsion_order"], 3);
  EXPECT_EQ(j["terms_match"], true);
  EXPECT_EQ(j["header"]["config"]["t0"], "0");
}

TEST(Cli, SpecializeAtBadReductionExitsThree) {
  auto dir = scratch("specbad");
  auto cfg = config(Command::specialize, "pole_coefficient", dir);
  cfg.t0 = Rational(1);
  auto r = run_cfg(cfg);
  EXPECT_EQ(r.code, 3);
  auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "bad-reduction");
  EXPECT_EQ(j["exit_code"], 3);
}

TEST(Cli, ConfigErrorsExitOne) {
  auto dir = scratch("cfg");
  auto r = run_cfg(config(Command::specialize, "standard", dir));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "invalid-input");
  auto cfg = config(Command::height, "standard", dir);
  cfg.tol = -1;
  cfg.tol_source = "flag";
  EXPECT_EQ(run_cfg(cfg).code, 1);
  cfg = config(Command::height, "standard", dir);
  cfg.m_max = 1;
  EXPECT_EQ(run_cfg(cfg).code, 1);
  cfg = config(Command::survey, "standard", dir);
  cfg.B_text = "log(";
  EXPECT_EQ(run_cfg(cfg).code, 1);
}

TEST(Cli, BadFamilyExitsTwo) {
  auto dir = scratch("badfam");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"a": ["0","1"], "b": ["1"], "Px": ["0"], "Py": ["2"]})";
  auto cfg = config(Command::height, "standard", dir);
  cfg.family_path = (dir / "bad.json").string();
  auto r = run_cfg(cfg);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "not-on-curve");
  cfg.family_path = (dir / "missing.json").string();
  EXPECT_EQ(run_cfg(cfg).code, 2);
}

TEST(Cli, ComputationErrorsExitThree) {
  auto dir = scratch("comp");
  auto cfg = config(Command::ffheight, "standard", dir);
  cfg.m_max_ff = 3;
  auto r = run_cfg(cfg);
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "no-stabilization");
  cfg = config(Command::sandwich, "three_torsion", dir);
  cfg.B_text = "0";
  r = run_cfg(cfg);
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "torsion-section");
}

TEST(Cli, FfHeightPrintsExactValue) {
  auto dir = scratch("ff");
  auto r = run_cfg(config(Command::ffheight, "standard", dir));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1/2\n");
  expect_csv_numbers_formatted(slurp(dir / "ffheight.csv"));
}

TEST(Cli, HeightBoundParsing) {
  EXPECT_DOUBLE_EQ(parse_height_bound("log(5)"), std::log(5.0));
  EXPECT_DOUBLE_EQ(parse_height_bound("log 7"), std::log(7.0));
  EXPECT_DOUBLE_EQ(parse_height_bound("1.5"), 1.5);
  EXPECT_THROW(parse_height_bound("-1"), ConfigError);
  EXPECT_THROW(parse_height_bound("seven"), ConfigError);
}

TEST(Cli, EnvironmentToleranceIsEchoed) {
  auto dir = scratch("env");
  ::setenv(kTolEnv, "1e-4", 1);
  auto r = run_cfg(config(Command::height, "mordell_2", dir));
  ::unsetenv(kTolEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(dir / "height.csv");
  EXPECT_NE(csv.find(R"("tol_source":"env CANHEIGHT_TOL")"), std::string::npos);
  EXPECT_NE(csv.find(R"("tol":"0.000100000000000")"), std::string::npos);

  ::setenv(kTolEnv, "1e-4", 1);
  auto cfg = config(Command::height, "mordell_2", dir);
  cfg.tol = 1e-6;
  cfg.tol_source = "flag";
  r = run_cfg(cfg);
  ::unsetenv(kTolEnv);
  EXPECT_NE(slurp(dir / "height.csv").find(R"("tol_source":"flag")"), std::string::npos);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  auto a = scratch("repeat_a"), b = scratch("repeat_b");
  for (auto fmt : {Format::csv, Format::json}) {
    auto ca = config(Command::sandwich, "standard", a);
    ca.B_text = "log(2)";
    ca.epsilon = 0.1;
    ca.format = fmt;
    ca.jobs = 1;
    auto cb = ca;
    cb.out_dir = b.string();
    cb.jobs = 3;
    ASSERT_EQ(run_cfg(ca).code, 0);
    ASSERT_EQ(run_cfg(cb).code, 0);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
    ++files;
  }
  EXPECT_EQ(files, 2u);
}

TEST(Cli, SurveyWritesCsvAndSummary) {
  auto dir = scratch("survey");
  auto cfg = config(Command::survey, "standard", dir);
  cfg.B_text = "log(2)";
  auto r = run_cfg(cfg);
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(dir / "survey.csv");
  expect_csv_numbers_formatted(csv);
  EXPECT_NE(csv.find("t0,h_t,hhat_fiber,hhat_section_route,route_gap,error_term,m_used_fiber,m_used_section\n"),
            std::string::npos);
  auto j = nlohmann::json::parse(slurp(dir / "survey_summary.json"));
  EXPECT_EQ(j["summary"]["degM"], "1/2");
  EXPECT_EQ(j["header"]["version"], kVersion);
}

TEST(Cli, ConvergeAndCensus) {
  auto dir = scratch("conv");
  auto r = run_cfg(config(Command::converge, "mordell_2", dir));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ok=true"), std::string::npos);
  std::string trace = slurp(dir / "converge.csv");
  EXPECT_NE(trace.find("m,a_m,diff_scaled\n"), std::string::npos);
  expect_csv_numbers_formatted(trace);

  auto cfg = config(Command::census, "standard", dir);
  cfg.B_text = "log(2)";
  cfg.epsilon = 0.01;
  r = run_cfg(cfg);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "small=2 undecided=0 census_size=7\n");
  expect_csv_numbers_formatted(slurp(dir / "census_small_set.csv"));
}
