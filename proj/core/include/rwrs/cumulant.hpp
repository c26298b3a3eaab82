#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "rwrs/occupation.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/toral_action.hpp"
#include "rwrs/trig_polynomial.hpp"

namespace rwrs {

/// Subset of {0, .., r-1} as a bitmask.
using IndexSet = std::uint32_t;

/// A partition of {0, .., r-1}; blocks are nonempty, disjoint and cover.
struct SetPartition {
  std::vector<IndexSet> blocks;
};

inline constexpr int kMaxPartitionOrder = 10;

/// All partitions of {0, .., r-1}, 1 <= r <= 10, from restricted growth
/// strings. Throws ValidationError("partition_order") otherwise.
std::vector<SetPartition> partitions(int r);

/// Subset function I -> m(I) (moments or cumulants of the variables in I).
using SubsetFunction = std::function<double(IndexSet)>;

/// sum over partitions of (-1)^{p-1} (p-1)! prod_blocks m(block).
double joint_cumulant(const SubsetFunction& moments, int r);

/// sum over partitions of prod_blocks s(block).
double moments_from_cumulants(const SubsetFunction& cumulants, int r);

/// r-th cumulant of a single variable from moments[j] = E Y^j, j = 0..r.
double single_cumulant(std::span<const double> moments, int r);

inline constexpr int kMaxToralMomentOrder = 6;
inline constexpr std::size_t kMaxToralMomentSupport = 32;

/// E prod_j f(A^{l_j} x) = sum over (k_1..k_r) with sum_j (A^{l_j})^T k_j = 0 of
/// prod_j c(k_j), by meet in the middle. Throws ValidationError
/// ("moment_order") for r > 6 and ("support_too_large") beyond 32 terms.
double exact_toral_moment(const TrigPolynomial& f, const ToralAction& action,
                          std::span<const Point> exponents);

/// Joint cumulant C_f(l_1, .., l_r) of the variables T^{l_j} f.
double toral_joint_cumulant(const TrigPolynomial& f, const ToralAction& action,
                            std::span<const Point> exponents);

struct LeonovResult {
  double statistic = 0.0;
  int order = 0;
  /// Largest pairwise gap (sup norm) among tuples with a nonzero cumulant.
  int range = 0;
  int search_radius = 0;
  /// True when every gap tuple with offsets in (range, search_radius] has a
  /// zero cumulant and search_radius >= range + 2.
  bool certified = true;
  std::size_t nonzero_tuples = 0;
};

/// sum_{l_1..l_r} w(l_1)..w(l_r) C_f(l_1..l_r) / (sum w^2)^{r/2}.
/// IID: kappa_r U^(r) / V^{r/2}. Toral: tuples are enumerated by their
/// offsets from l_1 within `search_radius`. Throws ValidationError
/// ("leonov_unsupported") for r < 3 or a moving-average model.
LeonovResult leonov_statistic(const OccupationField& w, const SceneryModel& model, int r,
                              int search_radius = 4);

}  // namespace rwrs
