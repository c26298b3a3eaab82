#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "rwrs/lattice_walk.hpp"
#include "rwrs/report.hpp"
#include "rwrs/types.hpp"

namespace rwrs {

/// Packed Z^2 site: biased 32-bit x in the high word, biased 32-bit y in the
/// low word. The packing preserves the lexicographic order of (x, y).
using SiteKey = std::uint64_t;

SiteKey pack_site(Point p);
Point unpack_site(SiteKey key);

/// Visit counts of a path over an index interval, stored as a sorted flat map.
///
/// Invariant: counts are positive and sum to the interval length.
class OccupationField {
 public:
  OccupationField() = default;

  /// Synthetic field from explicit counts (zero counts are dropped). The
  /// interval length is the total count.
  static OccupationField from_counts(const std::map<Point, std::uint64_t>& counts,
                                     std::size_t interval_begin = 0);

  const Interval& interval() const { return interval_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  std::uint64_t total() const;
  std::uint64_t max_count() const;

  std::uint64_t count_at(Point p) const;
  std::uint64_t count_at_key(SiteKey key) const;

  std::span<const SiteKey> keys() const { return keys_; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::vector<Point> sites() const;

 private:
  friend OccupationField occupation(const WalkPath&, Interval);
  Interval interval_{};
  std::vector<SiteKey> keys_;
  std::vector<std::uint64_t> counts_;
};

/// Occupation of positions Z_b .. Z_{b+k-1}. Throws ValidationError
/// ("interval_out_of_range") if the interval exceeds the path.
OccupationField occupation(const WalkPath& path, Interval interval);

/// V(I, J, p) = sum_l wI(l + p) wJ(l) = #{(u, v) in I x J : Z_u - Z_v = p}.
std::uint64_t intersections(const OccupationField& w_i, const OccupationField& w_j, Point p);

/// U^(m) = sum_l w(l)^m, exact. Throws for m < 1.
BigInt power_sum(const OccupationField& w, int m);

/// W(l1, l2, l3) = sum_l w(l) w(l + l1) w(l + l2) w(l + l3), the number of
/// index quadruples (i0, i1, i2, i3) with Z_{ij} - Z_{i0} = lj.
BigInt quadruple_count(const OccupationField& w, Point l1, Point l2, Point l3);

/// V(p) / V(0): the p-th Fourier coefficient of the normalized kernel of w.
/// Throws ValidationError("empty_field") on an empty field.
double kernel_fourier_ratio(const OccupationField& w, Point p);

/// V(I, J, p) for every |p| <= radius (sup norm).
struct IntersectionTable {
  int radius = 0;
  std::map<Point, std::uint64_t> entries;

  std::uint64_t at(Point p) const;
};

IntersectionTable intersection_table(const OccupationField& w_i, const OccupationField& w_j,
                                     int radius = 3);

struct LlnOptions {
  double epsilon = 0.25;         // exponent in the sup_l w_n = o(n^eps) diagnostic
  double band_lower = 0.75;      // ensemble-mean band for V_n / (C0 n ln n)
  double band_upper = 1.25;
  double toward_one_fraction = 0.8;
};

/// Per-path summary at one n; exposed so callers can inspect trends.
struct LlnSample {
  std::size_t n = 0;
  std::uint64_t self_intersections = 0;
  std::uint64_t max_visits = 0;
  double u3 = 0.0;
  double u4 = 0.0;
};

std::vector<LlnSample> lln_samples(const WalkPath& path, std::span<const std::size_t> n_grid);

/// Law-of-large-numbers diagnostics over an ensemble of paths and an
/// increasing n-grid: V_n/(C0 n ln n), sup_l w_n / n^eps, U^(3)/(n ln^4 n),
/// U^(4)/(n ln^5 n), monotonicity of V_n and the trend of the V ratio.
StatReport lln_table(std::span<const WalkPath> paths, std::span<const std::size_t> n_grid,
                     double c0, const LlnOptions& options = {});

}  // namespace rwrs
