#include "rwrs/occupation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace rwrs {

namespace {

constexpr std::int64_t kBias = std::int64_t{1} << 31;

bool packable(Point p) {
  return p.x > -kBias && p.x < kBias && p.y > -kBias && p.y < kBias;
}

// Sentinel never produced by pack_site for a packable point.
constexpr SiteKey kNoSite = std::numeric_limits<SiteKey>::max();

SiteKey shifted_key(SiteKey key, Point p) {
  const Point q = unpack_site(key) + p;
  return packable(q) ? pack_site(q) : kNoSite;
}

}  // namespace

SiteKey pack_site(Point p) {
  if (!packable(p)) {
    throw std::out_of_range("site coordinate exceeds the 32-bit packing range");
  }
  const auto ux = static_cast<std::uint64_t>(p.x + kBias);
  const auto uy = static_cast<std::uint64_t>(p.y + kBias);
  return (ux << 32) | uy;
}

Point unpack_site(SiteKey key) {
  return {static_cast<std::int64_t>(key >> 32) - kBias,
          static_cast<std::int64_t>(key & 0xffffffffull) - kBias};
}

OccupationField OccupationField::from_counts(const std::map<Point, std::uint64_t>& counts,
                                             std::size_t interval_begin) {
  OccupationField f;
  std::uint64_t total = 0;
  for (const auto& [site, c] : counts) {
    if (c == 0) continue;
    f.keys_.push_back(pack_site(site));
    f.counts_.push_back(c);
    total += c;
  }
  f.interval_ = {interval_begin, static_cast<std::size_t>(total)};
  return f;
}

std::uint64_t OccupationField::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::uint64_t OccupationField::max_count() const {
  std::uint64_t m = 0;
  for (auto c : counts_) m = std::max(m, c);
  return m;
}

std::uint64_t OccupationField::count_at_key(SiteKey key) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return 0;
  return counts_[static_cast<std::size_t>(it - keys_.begin())];
}

std::uint64_t OccupationField::count_at(Point p) const {
  if (!packable(p)) return 0;
  return count_at_key(pack_site(p));
}

std::vector<Point> OccupationField::sites() const {
  std::vector<Point> out;
  out.reserve(keys_.size());
  for (auto k : keys_) out.push_back(unpack_site(k));
  return out;
}

OccupationField occupation(const WalkPath& path, Interval interval) {
  if (interval.end() > path.positions.size()) {
    throw ValidationError("interval_out_of_range",
                          "interval [" + std::to_string(interval.begin) + ", " +
                              std::to_string(interval.end()) + ") exceeds a path with " +
                              std::to_string(path.positions.size()) + " positions");
  }
  std::vector<SiteKey> raw;
  raw.reserve(interval.length);
  for (std::size_t i = interval.begin; i < interval.end(); ++i) {
    raw.push_back(pack_site(path.positions[i]));
  }
  std::sort(raw.begin(), raw.end());

  OccupationField f;
  f.interval_ = interval;
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i + 1;
    while (j < raw.size() && raw[j] == raw[i]) ++j;
    f.keys_.push_back(raw[i]);
    f.counts_.push_back(j - i);
    i = j;
  }
  return f;
}

std::uint64_t intersections(const OccupationField& w_i, const OccupationField& w_j, Point p) {
  const auto ki = w_i.keys();
  const auto ci = w_i.counts();
  const auto kj = w_j.keys();
  const auto cj = w_j.counts();
  const std::size_t small = std::min(ki.size(), kj.size());
  const std::size_t large = std::max(ki.size(), kj.size());
  if (small == 0) return 0;

  std::uint64_t total = 0;
  const double log_large = std::log2(static_cast<double>(large) + 1.0);
  if (static_cast<double>(small) * log_large < static_cast<double>(small + large)) {
    // Iterate the smaller support, look up in the larger.
    if (kj.size() <= ki.size()) {
      for (std::size_t a = 0; a < kj.size(); ++a) {
        const SiteKey target = shifted_key(kj[a], p);
        if (target != kNoSite) total += w_i.count_at_key(target) * cj[a];
      }
    } else {
      const Point minus_p = -p;
      for (std::size_t a = 0; a < ki.size(); ++a) {
        const SiteKey target = shifted_key(ki[a], minus_p);
        if (target != kNoSite) total += w_j.count_at_key(target) * ci[a];
      }
    }
    return total;
  }

  // Comparable sizes: merge. Shifting preserves the key order.
  std::size_t a = 0;
  for (std::size_t b = 0; b < kj.size(); ++b) {
    const SiteKey target = shifted_key(kj[b], p);
    if (target == kNoSite) continue;
    while (a < ki.size() && ki[a] < target) ++a;
    if (a == ki.size()) break;
    if (ki[a] == target) total += ci[a] * cj[b];
  }
  return total;
}

BigInt power_sum(const OccupationField& w, int m) {
  if (m < 1) throw ValidationError("power_order", "power_sum needs m >= 1");
  BigInt total = 0;
  for (auto c : w.counts()) {
    total += boost::multiprecision::pow(BigInt(c), static_cast<unsigned>(m));
  }
  return total;
}

BigInt quadruple_count(const OccupationField& w, Point l1, Point l2, Point l3) {
  BigInt total = 0;
  const auto keys = w.keys();
  const auto counts = w.counts();
  for (std::size_t a = 0; a < keys.size(); ++a) {
    const Point site = unpack_site(keys[a]);
    const std::uint64_t c1 = w.count_at(site + l1);
    if (c1 == 0) continue;
    const std::uint64_t c2 = w.count_at(site + l2);
    if (c2 == 0) continue;
    const std::uint64_t c3 = w.count_at(site + l3);
    if (c3 == 0) continue;
    total += BigInt(counts[a]) * c1 * c2 * c3;
  }
  return total;
}

double kernel_fourier_ratio(const OccupationField& w, Point p) {
  if (w.empty()) throw ValidationError("empty_field", "kernel of an empty field is undefined");
  const auto v0 = intersections(w, w, {0, 0});
  return static_cast<double>(intersections(w, w, p)) / static_cast<double>(v0);
}

std::uint64_t IntersectionTable::at(Point p) const {
  const auto it = entries.find(p);
  return it == entries.end() ? 0 : it->second;
}

IntersectionTable intersection_table(const OccupationField& w_i, const OccupationField& w_j,
                                     int radius) {
  IntersectionTable t;
  t.radius = radius;
  for (int x = -radius; x <= radius; ++x) {
    for (int y = -radius; y <= radius; ++y) {
      t.entries[{x, y}] = intersections(w_i, w_j, {x, y});
    }
  }
  return t;
}

std::vector<LlnSample> lln_samples(const WalkPath& path, std::span<const std::size_t> n_grid) {
  std::vector<LlnSample> out;
  for (auto n : n_grid) {
    const auto w = occupation(path, {0, n});
    LlnSample s;
    s.n = n;
    s.self_intersections = intersections(w, w, {0, 0});
    s.max_visits = w.max_count();
    s.u3 = static_cast<double>(power_sum(w, 3));
    s.u4 = static_cast<double>(power_sum(w, 4));
    out.push_back(s);
  }
  return out;
}

StatReport lln_table(std::span<const WalkPath> paths, std::span<const std::size_t> n_grid,
                     double c0, const LlnOptions& options) {
  if (n_grid.empty()) throw ValidationError("grid", "n-grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw ValidationError("grid", "n-grid must be strictly increasing with n >= 2");
    }
  }
  StatReport report;
  report.experiment = "lln";

  std::vector<std::vector<LlnSample>> per_path;
  per_path.reserve(paths.size());
  for (const auto& path : paths) per_path.push_back(lln_samples(path, n_grid));

  const auto m = static_cast<std::uint64_t>(paths.size());
  bool monotone = true;
  double last_sup = 0.0;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const double n = static_cast<double>(n_grid[g]);
    const double ln = std::log(n);
    double sum = 0.0, sum_sq = 0.0, worst_sup = 0.0, u3 = 0.0, u4 = 0.0;
    for (const auto& samples : per_path) {
      const auto& s = samples[g];
      const double ratio = static_cast<double>(s.self_intersections) / (c0 * n * ln);
      sum += ratio;
      sum_sq += ratio * ratio;
      worst_sup = std::max(worst_sup, static_cast<double>(s.max_visits) / std::pow(n, options.epsilon));
      u3 += s.u3 / (n * std::pow(ln, 4));
      u4 += s.u4 / (n * std::pow(ln, 5));
      if (g > 0 && s.self_intersections < samples[g - 1].self_intersections) monotone = false;
    }
    const double mean = sum / static_cast<double>(m);
    const double var = m > 1 ? (sum_sq - static_cast<double>(m) * mean * mean) / static_cast<double>(m - 1) : 0.0;
    const std::string tag = "[n=" + std::to_string(n_grid[g]) + "]";
    report.estimate("V_ratio_mean" + tag, mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(m)), m);
    report.estimate("max_visits_over_n_eps_max" + tag, worst_sup, kNotApplicable, m);
    report.estimate("U3_over_n_ln4_mean" + tag, u3 / static_cast<double>(m), kNotApplicable, m);
    report.estimate("U4_over_n_ln5_mean" + tag, u4 / static_cast<double>(m), kNotApplicable, m);
    last_sup = worst_sup;
  }

  const double last_mean = report.estimates[4 * (n_grid.size() - 1)].value;
  report.check("V_ratio_mean_in_band[n=" + std::to_string(n_grid.back()) + "]", last_mean,
               options.band_lower, options.band_upper, m);
  report.check("max_visits_below_n_eps[n=" + std::to_string(n_grid.back()) + "]", last_sup,
               kNotApplicable, 1.0, m);
  report.flag("V_nondecreasing_in_n", monotone, m);

  if (n_grid.size() >= 2) {
    std::uint64_t toward = 0;
    const double n0 = static_cast<double>(n_grid.front());
    const double n1 = static_cast<double>(n_grid.back());
    for (const auto& samples : per_path) {
      const double r0 = static_cast<double>(samples.front().self_intersections) / (c0 * n0 * std::log(n0));
      const double r1 = static_cast<double>(samples.back().self_intersections) / (c0 * n1 * std::log(n1));
      if (std::abs(r1 - 1.0) < std::abs(r0 - 1.0)) ++toward;
    }
    const double frac = static_cast<double>(toward) / static_cast<double>(m);
    report.estimate("fraction_toward_one", frac, kNotApplicable, m);
    report.check("fraction_toward_one", frac, options.toward_one_fraction, kNotApplicable, m);
  }
  return report;
}

}  // namespace rwrs
