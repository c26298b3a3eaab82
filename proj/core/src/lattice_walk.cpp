#include "rwrs/lattice_walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace rwrs {

StepDistribution::StepDistribution(std::vector<StepAtom> atoms) {
  if (atoms.empty()) throw ValidationError("degenerate", "step law has no atoms");
  std::map<Point, Rational> merged;
  Rational total = 0;
  for (const auto& atom : atoms) {
    if (atom.probability <= 0) {
      throw ValidationError("probability", "step weights must be positive");
    }
    merged[atom.step] += atom.probability;
    total += atom.probability;
  }
  if (total != 1) {
    throw ValidationError("probability", "step weights sum to " + total.str() + ", not 1");
  }
  if (merged.size() == 1 && merged.begin()->first == Point{0, 0}) {
    throw ValidationError("degenerate", "single atom at the origin");
  }
  for (auto& [step, p] : merged) atoms_.push_back({step, p});
}

StepDistribution StepDistribution::simple_symmetric() {
  const Rational quarter(1, 4);
  return StepDistribution({{{1, 0}, quarter}, {{-1, 0}, quarter}, {{0, 1}, quarter}, {{0, -1}, quarter}});
}

Rational DistributionReport::covariance_determinant() const {
  return covariance[0][0] * covariance[1][1] - covariance[0][1] * covariance[1][0];
}

BigInt generated_subgroup_index(std::span<const Point> vectors) {
  BigInt g = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      BigInt minor = BigInt(vectors[i].x) * vectors[j].y - BigInt(vectors[i].y) * vectors[j].x;
      g = gcd(g, abs(minor));
    }
  }
  return g;
}

DistributionReport validate_distribution(const StepDistribution& d) {
  DistributionReport r;
  r.mean = {0, 0};
  for (const auto& a : d.atoms()) {
    r.mean[0] += a.probability * a.step.x;
    r.mean[1] += a.probability * a.step.y;
  }
  Rational sxx = 0, sxy = 0, syy = 0;
  for (const auto& a : d.atoms()) {
    const Rational dx = Rational(a.step.x) - r.mean[0];
    const Rational dy = Rational(a.step.y) - r.mean[1];
    sxx += a.probability * dx * dx;
    sxy += a.probability * dx * dy;
    syy += a.probability * dy * dy;
  }
  r.covariance = {{{sxx, sxy}, {sxy, syy}}};

  std::vector<Point> support;
  for (const auto& a : d.atoms()) support.push_back(a.step);
  r.aperiodic = generated_subgroup_index(support) == 1;

  // x + S generates Z^2 for every x iff the difference set S - S does, and
  // <S - S> = <S - s0> for any fixed s0 in S.
  std::vector<Point> translated;
  for (const auto& s : support) translated.push_back(s - support.front());
  r.strongly_aperiodic = generated_subgroup_index(translated) == 1;

  if (r.strongly_aperiodic && r.centered() && r.covariance_determinant() != 0) {
    r.c0 = c0_formula(r);
  }
  return r;
}

double c0_formula(const DistributionReport& report) {
  const Rational det = report.covariance_determinant();
  if (det <= 0) throw ValidationError("singular_covariance", "covariance matrix is singular");
  return 1.0 / (std::numbers::pi * std::sqrt(static_cast<double>(det)));
}

double c0_constant(const DistributionReport& report) {
  if (!report.strongly_aperiodic || !report.centered() || report.covariance_determinant() == 0) {
    throw ValidationError("empirical_c0_required",
                          "closed-form C0 needs a strongly aperiodic, centered walk with "
                          "nonsingular covariance; estimate it empirically");
  }
  return c0_formula(report);
}

StepSampler::StepSampler(const StepDistribution& d) {
  double running = 0.0;
  for (const auto& a : d.atoms()) {
    steps_.push_back(a.step);
    running += static_cast<double>(a.probability);
    cumulative_.push_back(running);
  }
  cumulative_.back() = 1.0;
}

Point StepSampler::draw(RandomStream& stream) const {
  const double u = stream.uniform01();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         steps_.size() - 1);
  return steps_[idx];
}

WalkPath sample_path(const StepDistribution& d, std::size_t n, RandomStream& stream) {
  const StepSampler sampler(d);
  WalkPath path;
  path.master_seed = stream.master_seed();
  path.stream_id = stream.stream_id();
  path.positions.reserve(n + 1);
  Point z{0, 0};
  path.positions.push_back(z);
  for (std::size_t k = 0; k < n; ++k) {
    z += sampler.draw(stream);
    path.positions.push_back(z);
  }
  return path;
}

WalkPath path_from_positions(std::vector<Point> positions) {
  if (positions.empty() || positions.front() != Point{0, 0}) {
    throw ValidationError("path_origin", "a path must start at the origin");
  }
  WalkPath path;
  path.positions = std::move(positions);
  return path;
}

}  // namespace rwrs
