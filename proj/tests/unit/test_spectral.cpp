#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rwrs/spectral.hpp"

using namespace rwrs;

namespace {

MovingAverage sample_filter() {
  MovingAverage ma;
  ma.coefficients = {{{0, 0}, 1.0}, {{1, 0}, -0.4}, {{0, 1}, 0.3}, {{2, -1}, 0.2}};
  ma.base = IidLaw::gaussian(1.5);
  return ma;
}

WalkPath walk(std::uint64_t id, std::size_t n) {
  RandomStream s(99, id);
  return sample_path(StepDistribution::simple_symmetric(), n, s);
}

double brute_power_tail(double beta, int r, int cutoff, bool sup) {
  double s = 0.0;
  for (int x = -cutoff; x <= cutoff; ++x)
    for (int y = -cutoff; y <= cutoff; ++y) {
      const int m = std::max(std::abs(x), std::abs(y));
      if (m > r) s += std::pow(sup ? double(m) : std::hypot(x, y), -beta);
    }
  return s;
}

}  // namespace

TEST(CorrelationTable, IidIsDiagonal) {
  const auto t = correlation_table(IidLaw::rademacher(2.0), 3);
  EXPECT_TRUE(t.certified());
  EXPECT_DOUBLE_EQ(t.at({0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(t.window_sum(), 2.0);
  EXPECT_EQ(t.support().size(), 1u);
  EXPECT_EQ(t.at({50, 50}), 0.0);
}

TEST(CorrelationTable, MovingAverageWindowAndTail) {
  const auto ma = sample_filter();
  const auto full = correlation_table(ma, 5);
  EXPECT_TRUE(full.certified());
  const double sum = ma.coefficient_sum();
  EXPECT_NEAR(full.window_sum(), 1.5 * sum * sum, 1e-14);
  // Radius 1 omits the correlations at lags like (2, -1) and (3, -1).
  const auto cut = correlation_table(ma, 1);
  double omitted = 0.0;
  for (int x = -5; x <= 5; ++x)
    for (int y = -5; y <= 5; ++y)
      if (std::max(std::abs(x), std::abs(y)) > 1) omitted += std::abs(exact_correlation(ma, {x, y}));
  EXPECT_GT(cut.tail_bound, 0.0);
  EXPECT_NEAR(cut.tail_bound, omitted, 1e-14);
}

TEST(SpectralDensity, MovingAverageClosedFormMatchesTable) {
  const SceneryModel ma = sample_filter();
  const auto table = correlation_table(ma, 5);
  for (auto t : {std::array<double, 2>{0, 0}, {0.1, 0.3}, {0.5, 0.5}, {0.77, 0.01}}) {
    const double closed = spectral_density_eval(ma, t).value;
    EXPECT_NEAR(closed, spectral_density_eval(table, t).value, 1e-12);
    EXPECT_GE(closed, 0.0);
  }
}

TEST(SpectralDensity, AsymptoticVarianceOfMovingAverage) {
  const auto ma = sample_filter();
  const double c0 = 2.0 / std::numbers::pi;
  const auto v = asymptotic_variance(ma, c0);
  const double sum = ma.coefficient_sum();
  EXPECT_NEAR(v.value, 1.5 * sum * sum * c0, 1e-14);
  EXPECT_EQ(v.tail_bound, 0.0);
}

TEST(VarianceExact, MatchesDoubleLoop) {
  const SceneryModel ma = sample_filter();
  const auto table = correlation_table(ma, 5);
  for (std::uint64_t id = 0; id < 10; ++id) {
    const auto path = walk(id, 300);
    const auto wa = occupation(path, {0, 120}), wb = occupation(path, {120, 180});
    double brute = 0.0, cross = 0.0;
    for (int u = 0; u < 300; ++u)
      for (int v = 0; v < 300; ++v) {
        const double r = exact_correlation(ma, path.positions[u] - path.positions[v]);
        const double au = u < 120 ? 2.0 : -1.0, av = v < 120 ? 2.0 : -1.0;
        brute += au * av * r;
        if (u < 120 && v >= 120) cross += r;
      }
    const WeightedField f[2] = {{&wa, 2.0}, {&wb, -1.0}};
    const auto res = variance_exact(f, table);
    EXPECT_TRUE(res.exact);
    EXPECT_NEAR(res.value, brute, 1e-9 * std::abs(brute));
    EXPECT_NEAR(covariance_exact(wa, wb, table), cross, 1e-9 * std::max(1.0, std::abs(cross)));
  }
}

TEST(VarianceExact, IidEqualsSelfIntersections) {
  const auto path = walk(42, 5000);
  const auto w = occupation(path, {0, 5000});
  const auto table = correlation_table(IidLaw::uniform(2.0), 3);
  const WeightedField f{&w, 1.0};
  const double v = power_sum(w, 2).convert_to<double>();
  EXPECT_EQ(variance_exact(std::span(&f, 1), table).value, v * (4.0 / 3.0));
}

TEST(CorrelationTable, ToralReferenceIsCertified) {
  const ToralModel f{ToralAction::reference_example(), TrigPolynomial(3).add_cosine({1, 0, 0}, 2.0)};
  const auto t = correlation_table(f, 6);
  EXPECT_TRUE(t.certified());
  EXPECT_DOUBLE_EQ(t.window_sum(), 2.0);
  const ToralModel cob{f.action, coboundary(f.observable, 1, f.action)};
  const auto tc = correlation_table(cob, 20);
  EXPECT_EQ(tc.window_sum(), 0.0);
  EXPECT_EQ(asymptotic_variance(cob, 1.0).value, 0.0);
}

TEST(PowerDecayRule, TailBoundIsUpperBoundAndTight) {
  const PowerDecayRule rule(2, 4.0);
  for (int r : {2, 5, 10}) {
    const double brute = brute_power_tail(4.0, r, 300, false);
    const double shells = brute_power_tail(4.0, r, 300, true);
    const double bound = rule.tail_bound(r);
    EXPECT_GE(bound, brute);
    EXPECT_LE(bound, 4.0 * brute);
    // Sup-norm shells are summed exactly.
    EXPECT_NEAR(bound, shells, 1e-3 * shells + 1e-4);
  }
  EXPECT_TRUE(std::isinf(PowerDecayRule(2, 2.0).tail_bound(3)));
}

TEST(Ac0Truncate, FinitePolynomialIsExact) {
  TrigPolynomial f(3);
  f.add_cosine({1, 0, 0}, 1.0).add_cosine({0, 2, 1}, 0.5);
  const auto t = ac0_truncate(FinitePolynomialRule(f), 1e-6);
  EXPECT_EQ(t.tail_bound, 0.0);
  EXPECT_EQ(t.polynomial.terms(), f.terms());
}

TEST(Ac0Truncate, PowerDecayMinimalRadius) {
  const PowerDecayRule rule(2, 5.0);
  const double eps = 1e-4;
  const auto t = ac0_truncate(rule, eps);
  EXPECT_LE(t.tail_bound * t.tail_bound, eps);
  ASSERT_GT(t.radius, 0);
  const double prev = rule.tail_bound(t.radius - 1);
  EXPECT_GT(prev * prev, eps);
  EXPECT_THROW(ac0_truncate(PowerDecayRule(2, 1.5), eps), ValidationError);
  EXPECT_THROW(ac0_truncate(rule, 0.0), ValidationError);
}
