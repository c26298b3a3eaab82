#include "rwrs/cumulant.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>

namespace rwrs {

namespace {

void grow(int i, int r, int blocks, std::vector<int>& labels, std::vector<SetPartition>& out) {
  if (i == r) {
    SetPartition p;
    p.blocks.assign(static_cast<std::size_t>(blocks), 0);
    for (int j = 0; j < r; ++j) p.blocks[static_cast<std::size_t>(labels[j])] |= IndexSet{1} << j;
    out.push_back(std::move(p));
    return;
  }
  for (int b = 0; b <= blocks; ++b) {
    labels[i] = b;
    grow(i + 1, r, std::max(blocks, b + 1), labels, out);
  }
}

std::vector<double> tabulate(const SubsetFunction& f, int r) {
  std::vector<double> table(std::size_t{1} << r, 0.0);
  for (IndexSet s = 1; s < (IndexSet{1} << r); ++s) table[s] = f(s);
  return table;
}

void check_order(int r) {
  if (r < 1 || r > kMaxPartitionOrder) {
    throw ValidationError("partition_order", "order must be in [1, 10], got " + std::to_string(r));
  }
}

}  // namespace

std::vector<SetPartition> partitions(int r) {
  check_order(r);
  std::vector<SetPartition> out;
  std::vector<int> labels(static_cast<std::size_t>(r), 0);
  grow(0, r, 0, labels, out);
  return out;
}

double joint_cumulant(const SubsetFunction& moments, int r) {
  check_order(r);
  const auto m = tabulate(moments, r);
  double factorial[kMaxPartitionOrder + 1] = {1};
  for (int i = 1; i <= kMaxPartitionOrder; ++i) factorial[i] = factorial[i - 1] * i;
  double total = 0.0;
  for (const auto& p : partitions(r)) {
    const auto blocks = static_cast<int>(p.blocks.size());
    double term = ((blocks - 1) % 2 == 0 ? 1.0 : -1.0) * factorial[blocks - 1];
    for (auto b : p.blocks) term *= m[b];
    total += term;
  }
  return total;
}

double moments_from_cumulants(const SubsetFunction& cumulants, int r) {
  check_order(r);
  const auto s = tabulate(cumulants, r);
  double total = 0.0;
  for (const auto& p : partitions(r)) {
    double term = 1.0;
    for (auto b : p.blocks) term *= s[b];
    total += term;
  }
  return total;
}

double single_cumulant(std::span<const double> moments, int r) {
  if (static_cast<int>(moments.size()) <= r) {
    throw ValidationError("moment_order", "need moments E Y^0 .. E Y^r");
  }
  return joint_cumulant([&](IndexSet s) { return moments[static_cast<std::size_t>(std::popcount(s))]; }, r);
}

namespace {

// Transported coefficient supports, cached per exponent.
class ToralMomentEngine {
 public:
  ToralMomentEngine(const TrigPolynomial& f, const ToralAction& action) : action_(action) {
    if (f.size() > kMaxToralMomentSupport) {
      throw ValidationError("support_too_large", "observable has " + std::to_string(f.size()) +
                                                     " terms, limit is 32");
    }
    if (f.dimension() != action.dimension()) {
      throw ValidationError("frequency_dimension", "observable and action dimensions differ");
    }
    for (const auto& [k, c] : f.terms()) {
      freqs_.emplace_back(k.begin(), k.end());
      coefs_.push_back(c);
    }
  }

  double moment(std::span<const Point> exponents) {
    const std::size_t r = exponents.size();
    if (r > static_cast<std::size_t>(kMaxToralMomentOrder)) {
      throw ValidationError("moment_order", "toral moments are limited to r <= 6");
    }
    if (r == 0) return 1.0;
    if (freqs_.empty()) return 0.0;
    std::vector<const std::vector<IntVector>*> images;
    for (const Point l : exponents) images.push_back(&images_at(l));

    const std::size_t half = r / 2;
    const std::size_t rho = static_cast<std::size_t>(action_.dimension());
    std::map<IntVector, std::complex<double>> left;
    enumerate(images, 0, half, IntVector(rho, BigInt(0)), 1.0,
              [&](const IntVector& sum, std::complex<double> c) { left[sum] += c; });
    std::complex<double> total = 0.0;
    enumerate(images, half, r, IntVector(rho, BigInt(0)), 1.0,
              [&](const IntVector& sum, std::complex<double> c) {
                IntVector neg(sum);
                for (auto& v : neg) v = -v;
                const auto it = left.find(neg);
                if (it != left.end()) total += it->second * c;
              });
    return total.real();
  }

 private:
  const std::vector<IntVector>& images_at(Point l) {
    auto it = images_.find(l);
    if (it != images_.end()) return it->second;
    const IntMatrix t = action_.transposed_power(l);
    std::vector<IntVector> img;
    img.reserve(freqs_.size());
    for (const auto& k : freqs_) img.push_back(t * k);
    return images_.emplace(l, std::move(img)).first->second;
  }

  template <class Sink>
  void enumerate(const std::vector<const std::vector<IntVector>*>& images, std::size_t from,
                 std::size_t to, IntVector sum, std::complex<double> coef, Sink&& sink) {
    if (from == to) {
      sink(sum, coef);
      return;
    }
    const auto& img = *images[from];
    for (std::size_t t = 0; t < img.size(); ++t) {
      IntVector next(sum);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += img[t][i];
      enumerate(images, from + 1, to, std::move(next), coef * coefs_[t], sink);
    }
  }

  const ToralAction& action_;
  std::vector<IntVector> freqs_;
  std::vector<std::complex<double>> coefs_;
  std::map<Point, std::vector<IntVector>> images_;
};

// Moments depend only on the multiset of exponents up to translation.
class CumulantCache {
 public:
  CumulantCache(const TrigPolynomial& f, const ToralAction& action) : engine_(f, action) {}

  double moment(std::vector<Point> exponents) {
    std::sort(exponents.begin(), exponents.end());
    const Point base = exponents.front();
    for (auto& p : exponents) p = p - base;
    auto it = moments_.find(exponents);
    if (it != moments_.end()) return it->second;
    const double m = engine_.moment(exponents);
    moments_.emplace(std::move(exponents), m);
    return m;
  }

  double cumulant(std::span<const Point> exponents) {
    const int r = static_cast<int>(exponents.size());
    return joint_cumulant(
        [&](IndexSet s) {
          std::vector<Point> sub;
          for (int j = 0; j < r; ++j) {
            if (s & (IndexSet{1} << j)) sub.push_back(exponents[static_cast<std::size_t>(j)]);
          }
          return moment(std::move(sub));
        },
        r);
  }

 private:
  ToralMomentEngine engine_;
  std::map<std::vector<Point>, double> moments_;
};

}  // namespace

double exact_toral_moment(const TrigPolynomial& f, const ToralAction& action,
                          std::span<const Point> exponents) {
  ToralMomentEngine engine(f, action);
  return engine.moment(exponents);
}

double toral_joint_cumulant(const TrigPolynomial& f, const ToralAction& action,
                            std::span<const Point> exponents) {
  if (exponents.empty()) throw ValidationError("moment_order", "cumulant needs r >= 1");
  CumulantCache cache(f, action);
  return cache.cumulant(exponents);
}

LeonovResult leonov_statistic(const OccupationField& w, const SceneryModel& model, int r,
                              int search_radius) {
  if (r < 3) throw ValidationError("leonov_unsupported", "Leonov statistic needs r >= 3");
  if (w.empty()) throw ValidationError("empty_field", "Leonov statistic of an empty field");
  LeonovResult result;
  result.order = r;
  const double v = static_cast<double>(power_sum(w, 2));
  const double norm = std::pow(v, r / 2.0);

  if (const auto* law = std::get_if<IidLaw>(&model)) {
    check_order(r);
    result.statistic = law->cumulant(r) * static_cast<double>(power_sum(w, r)) / norm;
    return result;
  }
  const auto* toral = std::get_if<ToralModel>(&model);
  if (toral == nullptr) {
    throw ValidationError("leonov_unsupported", "Leonov statistic needs an IID or toral model");
  }
  if (r > kMaxToralMomentOrder) throw ValidationError("moment_order", "toral cumulants need r <= 6");
  result.search_radius = search_radius;

  CumulantCache cache(toral->observable, toral->action);
  const int side = 2 * search_radius + 1;
  const std::size_t offsets = static_cast<std::size_t>(r - 1);
  std::size_t count = 1;
  for (std::size_t i = 0; i < 2 * offsets; ++i) count *= static_cast<std::size_t>(side);

  struct Tuple {
    std::vector<Point> offsets;
    double cumulant;
  };
  std::vector<Tuple> nonzero;
  std::vector<Point> exps(static_cast<std::size_t>(r));
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t c = code;
    exps[0] = {0, 0};
    for (std::size_t j = 1; j <= offsets; ++j) {
      const auto x = static_cast<std::int64_t>(c % static_cast<std::size_t>(side)) - search_radius;
      c /= static_cast<std::size_t>(side);
      const auto y = static_cast<std::int64_t>(c % static_cast<std::size_t>(side)) - search_radius;
      c /= static_cast<std::size_t>(side);
      exps[j] = {x, y};
    }
    const double kappa = cache.cumulant(exps);
    if (std::abs(kappa) < 1e-12) continue;
    std::int64_t gap = 0;
    for (const auto& a : exps) {
      for (const auto& b : exps) gap = std::max(gap, sup_norm(a - b));
    }
    result.range = std::max(result.range, static_cast<int>(gap));
    nonzero.push_back({std::vector<Point>(exps.begin() + 1, exps.end()), kappa});
  }
  result.nonzero_tuples = nonzero.size();
  result.certified = search_radius >= result.range + 2;

  const auto keys = w.keys();
  const auto counts = w.counts();
  double total = 0.0;
  for (std::size_t a = 0; a < keys.size(); ++a) {
    const Point base = unpack_site(keys[a]);
    for (const auto& t : nonzero) {
      double prod = static_cast<double>(counts[a]) * t.cumulant;
      for (const Point g : t.offsets) {
        const auto c = w.count_at(base + g);
        if (c == 0) {
          prod = 0.0;
          break;
        }
        prod *= static_cast<double>(c);
      }
      total += prod;
    }
  }
  result.statistic = total / norm;
  return result;
}

}  // namespace rwrs
