#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace rwrs {

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

struct Estimate {
  std::string name;
  double value = 0.0;
  double std_error = kNotApplicable;
  std::uint64_t sample_size = 0;
};

/// A pass/fail decision. `lower`/`upper` are the acceptance bounds on
/// `statistic`; NaN means unbounded on that side.
struct Verdict {
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double lower = kNotApplicable;
  double upper = kNotApplicable;
  std::uint64_t sample_size = 0;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t master_seed = 0;
};

/// Structured output of an experiment.
struct StatReport {
  std::string experiment;
  std::vector<Estimate> estimates;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  Provenance provenance;

  void estimate(std::string name, double value, double std_error = kNotApplicable,
                std::uint64_t sample_size = 0);
  /// Records lower <= statistic <= upper (either bound may be NaN).
  const Verdict& check(std::string name, double statistic, double lower, double upper,
                       std::uint64_t sample_size);
  void flag(std::string name, bool passed, std::uint64_t sample_size);

  bool passed() const;
  const Estimate* find_estimate(const std::string& name) const;
  const Verdict* find_verdict(const std::string& name) const;

  /// Append everything from `other`, prefixing names with `prefix`.
  void merge(const StatReport& other, const std::string& prefix);
};

/// Long-format CSV: one header row, then one row per estimate and verdict.
/// Floats use 17 significant digits.
std::string to_csv(const StatReport& report);
std::string to_json(const StatReport& report, int indent = 2);

/// 17-significant-digit rendering shared by all serializers.
std::string format_double(double value);

}  // namespace rwrs
