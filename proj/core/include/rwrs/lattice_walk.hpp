#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwrs/rng.hpp"
#include "rwrs/types.hpp"

namespace rwrs {

struct StepAtom {
  Point step;
  Rational probability;
};

/// Law of one increment of a lattice walk, with exact rational weights.
class StepDistribution {
 public:
  /// Throws ValidationError("probability") unless every weight is positive and
  /// the weights sum to exactly 1, and ValidationError("degenerate") for the
  /// single atom at the origin. Repeated steps are merged.
  explicit StepDistribution(std::vector<StepAtom> atoms);

  /// The simple symmetric walk: (+-1, 0), (0, +-1) with weight 1/4 each.
  static StepDistribution simple_symmetric();

  const std::vector<StepAtom>& atoms() const { return atoms_; }

 private:
  std::vector<StepAtom> atoms_;
};

struct DistributionReport {
  std::array<Rational, 2> mean;
  std::array<std::array<Rational, 2>, 2> covariance;
  bool aperiodic = false;
  bool strongly_aperiodic = false;
  /// Present iff strongly aperiodic, centered and Sigma nonsingular.
  std::optional<double> c0;

  bool centered() const { return mean[0] == 0 && mean[1] == 0; }
  Rational covariance_determinant() const;
};

/// Index of the subgroup of Z^2 generated by `vectors` (0 when the subgroup
/// has rank < 2). Equals the gcd of all 2x2 minors.
BigInt generated_subgroup_index(std::span<const Point> vectors);

DistributionReport validate_distribution(const StepDistribution& d);

/// (pi * sqrt(det Sigma))^{-1}. Throws ValidationError("empirical_c0_required")
/// unless the report is strongly aperiodic, centered and Sigma nonsingular.
double c0_constant(const DistributionReport& report);

/// Closed-form constant for any report with a nonsingular covariance; no
/// aperiodicity requirement. Used where the caller has decided the formula
/// applies (e.g. the simple symmetric walk, whose period 2 excludes it from
/// c0_constant).
double c0_formula(const DistributionReport& report);

struct WalkPath {
  std::vector<Point> positions;  // Z_0 .. Z_n, Z_0 = origin
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  std::size_t steps() const { return positions.empty() ? 0 : positions.size() - 1; }
};

/// Inverse-CDF sampler over a floating-point cumulative table built from the
/// exact weights (table error <= 1 ulp per entry).
class StepSampler {
 public:
  explicit StepSampler(const StepDistribution& d);
  Point draw(RandomStream& stream) const;

 private:
  std::vector<Point> steps_;
  std::vector<double> cumulative_;
};

WalkPath sample_path(const StepDistribution& d, std::size_t n, RandomStream& stream);

/// Path from explicit positions (synthetic inputs, tests). First position must
/// be the origin.
WalkPath path_from_positions(std::vector<Point> positions);

}  // namespace rwrs
