#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace rwrs;

namespace {

const std::string kConfigs = RWRS_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rwrs_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rwrs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::AppConfig parse(const std::string& yaml) { return cli::parse_config(YAML::Load(yaml)); }

std::string error_code(const std::string& yaml) {
  try {
    parse(yaml);
  } catch (const ValidationError& e) {
    return e.code();
  }
  return "ok";
}

}  // namespace

TEST(Config, DefaultsAndHash) {
  const auto a = parse("{}");
  EXPECT_EQ(a.experiment.master_seed, 1u);
  EXPECT_EQ(cli::config_hash(a).size(), 16u);
  EXPECT_EQ(cli::config_hash(a), cli::config_hash(parse("seed: 1")));
  EXPECT_NE(cli::config_hash(a), cli::config_hash(parse("seed: 2")));
  // Worker count is not semantic.
  EXPECT_EQ(cli::config_hash(a), cli::config_hash(parse("workers: 4")));
}

TEST(Config, ExactProbabilities) {
  const auto cfg = parse(R"(
walk:
  steps:
    - {step: [1, 0], p: "1/3"}
    - {step: [-1, 0], p: "1/3"}
    - {step: [0, 1], p: "1/6"}
    - {step: [0, -1], p: "1/6"}
)");
  EXPECT_EQ(cfg.experiment.walk.atoms().size(), 4u);
  EXPECT_EQ(error_code("walk: {steps: [{step: [1, 0], p: \"1/2\"}]}"), "probability");
}

TEST(Config, Errors) {
  EXPECT_EQ(error_code("bogus: 1"), "config");
  EXPECT_EQ(error_code("experiment: {normalization: sideways}"), "config");
  EXPECT_EQ(error_code("scenery: {kind: banana}"), "config");
  EXPECT_EQ(error_code("scenery: {kind: iid, law: {type: gaussian, variance: -1}}"), "law_parameter");
  EXPECT_EQ(error_code("experiment: {n: many}"), "config");
}

TEST(Config, C0Resolution) {
  std::vector<std::string> notes;
  auto ssrw = parse("{}");
  EXPECT_NEAR(cli::resolve_c0(ssrw, notes), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_EQ(notes.size(), 1u);
  auto explicit_c0 = parse("c0: 0.5");
  EXPECT_EQ(cli::resolve_c0(explicit_c0, notes), 0.5);
  auto even = parse(R"(
walk:
  steps:
    - {step: [2, 0], p: "1/2"}
    - {step: [-2, 0], p: "1/2"}
)");
  EXPECT_THROW(cli::resolve_c0(even, notes), ValidationError);
}

TEST(Run, ToralVerifyExitsZero) {
  const auto out = scratch("toral");
  EXPECT_EQ(run_cli({"toral-verify", "--config", kConfigs + "/toral_verify.yaml", "--out", out.string()}), 0);
  EXPECT_TRUE(fs::exists(out / "toral_verify.csv"));
  EXPECT_TRUE(fs::exists(out / "toral_verify.json"));
  EXPECT_NE(slurp(out / "toral_verify.csv").find("commute,1"), std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(out / "toral_verify_manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "toral-verify");
  EXPECT_TRUE(manifest["timings"].contains("toral-verify"));
}

TEST(Run, MalformedGridExitsOne) {
  const auto out = scratch("grid");
  const auto cfg = out / "bad.yaml";
  std::ofstream(cfg) << "experiment:\n  n: 1000\n  time_grid: [0.0, 0.6, 0.3, 1.0]\n";
  EXPECT_EQ(run_cli({"fclt", "--config", cfg.string(), "--out", out.string()}), 1);
  EXPECT_EQ(run_cli({"fclt", "--config", (out / "missing.yaml").string()}), 1);
  EXPECT_EQ(run_cli({"nonsense"}), 1);
}

TEST(Run, FailingVerdictExitsTwo) {
  const auto out = scratch("fail");
  const auto cfg = out / "strict.yaml";
  std::ofstream(cfg) << "lln:\n  n_grid: [500, 1000, 2000]\n  paths: 3\n  band: [5.0, 6.0]\n";
  EXPECT_EQ(run_cli({"lln", "--config", cfg.string(), "--out", out.string()}), 2);
}

TEST(Run, CsvIdenticalAcrossWorkersAndReruns) {
  const std::string cfg = kConfigs + "/quick.yaml";
  for (const std::string sub : {"fclt", "maximal", "variance"}) {
    const auto a = scratch(sub + "_a"), b = scratch(sub + "_b"), c = scratch(sub + "_c");
    ASSERT_EQ(run_cli({sub, "--config", cfg, "--workers", "1", "--out", a.string()}), 0) << sub;
    ASSERT_EQ(run_cli({sub, "--config", cfg, "--workers", "3", "--out", b.string()}), 0) << sub;
    ASSERT_EQ(run_cli({sub, "--config", cfg, "--workers", "1", "--out", c.string()}), 0) << sub;
    const std::string stem = sub;
    EXPECT_EQ(slurp(a / (stem + ".csv")), slurp(b / (stem + ".csv"))) << sub;
    EXPECT_EQ(slurp(a / (stem + ".csv")), slurp(c / (stem + ".csv"))) << sub;
    EXPECT_EQ(slurp(a / (stem + ".json")), slurp(b / (stem + ".json"))) << sub;
  }
}

TEST(Run, SeedFlagAndEnvironmentOverride) {
  const std::string cfg = kConfigs + "/quick.yaml";
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  ASSERT_EQ(run_cli({"variance", "--config", cfg, "--seed", "99", "--format", "csv", "--out", a.string()}), 0);
  ::setenv("RWRS_SEED", "99", 1);
  ASSERT_EQ(run_cli({"variance", "--config", cfg, "--format", "csv", "--out", b.string()}), 0);
  ::unsetenv("RWRS_SEED");
  EXPECT_EQ(slurp(a / "variance.csv"), slurp(b / "variance.csv"));
  EXPECT_FALSE(fs::exists(a / "variance.json"));
  const auto manifest = nlohmann::json::parse(slurp(b / "variance_manifest.json"));
  EXPECT_EQ(manifest["master_seed"], 99);
}
