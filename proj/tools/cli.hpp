#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "rwrs/limit_lab.hpp"

namespace rwrs::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Where C0 comes from: the closed form for the walk, or an explicit value.
struct C0Source {
  enum class Kind { kAuto, kFormula, kValue } kind = Kind::kAuto;
  double value = 0.0;
};

struct LlnSection {
  std::vector<std::size_t> n_grid{10000, 100000, 1000000};
  std::size_t paths = 20;
  LlnOptions options;
};

struct CrossTermSection {
  double a = 0.5;
  Point p{0, 0};
  double max_value = 0.2;
};

struct MaximalSection {
  double lambda = 3.0;
  Interval interval{0, 0};
  std::size_t superadditivity_splits = 1000;
};

struct CumulantSection {
  std::vector<int> orders{3, 4};
  std::vector<std::size_t> n_grid{1000, 10000, 100000};
  int search_radius = 4;
};

struct ToralSection {
  int check_radius = 12;
  int agreement_radius = 5;
  std::size_t points = 20000;
};

struct C0Section {
  std::vector<std::size_t> n_grid{62500, 125000, 250000, 500000, 1000000};
  std::size_t paths = 20;
};

/// Parsed configuration. Every field except `workers` is semantic.
struct AppConfig {
  ExperimentConfig experiment;
  C0Source c0;
  LlnSection lln;
  CrossTermSection cross_term;
  MaximalSection maximal;
  CumulantSection cumulants;
  ToralSection toral;
  C0Section estimate_c0;
  /// Canonical form of the semantic fields; its hash identifies the run.
  nlohmann::ordered_json canonical;
};

/// Throws ValidationError (code "config" for malformed YAML or unknown values).
AppConfig parse_config(const YAML::Node& root);
AppConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const AppConfig& cfg);

/// Resolves the C0 source against the walk; throws "empirical_c0_required"
/// when no closed form applies.
double resolve_c0(const AppConfig& cfg, std::vector<std::string>& notes);

/// Runs one experiment subcommand and returns its report.
StatReport run_experiment(const std::string& subcommand, AppConfig& cfg);

const std::vector<std::string>& subcommands();

/// Entry point; returns the process exit status (0 ok, 1 validation, 2 FAIL).
int run(int argc, const char* const* argv);

}  // namespace rwrs::cli
