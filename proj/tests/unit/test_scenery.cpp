#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "rwrs/scenery.hpp"

using namespace rwrs;

namespace {

// Composite Simpson rule on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double gaussian_density(double x, double var) {
  return std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

std::vector<SiteKey> box(int r) {
  std::vector<SiteKey> keys;
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y) keys.push_back(pack_site({x, y}));
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

TEST(IidLaw, MomentsMatchQuadrature) {
  const auto u = IidLaw::uniform(2.0);
  const auto g = IidLaw::gaussian(1.5);
  for (int j = 1; j <= 8; ++j) {
    const double mu = simpson([j](double x) { return std::pow(x, j) / 4.0; }, -2, 2);
    EXPECT_NEAR(u.moment(j), mu, 1e-9 * std::max(1.0, std::abs(mu))) << j;
    const double mg = simpson([j](double x) { return std::pow(x, j) * gaussian_density(x, 1.5); }, -30, 30);
    EXPECT_NEAR(g.moment(j), mg, 1e-8 * std::max(1.0, std::abs(mg))) << j;
  }
  const auto r = IidLaw::rademacher(4.0);
  EXPECT_DOUBLE_EQ(r.moment(2), 4.0);
  EXPECT_DOUBLE_EQ(r.moment(4), 16.0);
  const auto t = IidLaw::two_point(-1.0, 3.0);
  EXPECT_NEAR(t.moment(1), 0.0, 1e-15);
  EXPECT_NEAR(t.moment(2), 3.0, 1e-14);  // P(-1) = 3/4, P(3) = 1/4
}

TEST(IidLaw, CumulantsOfKnownLaws) {
  EXPECT_DOUBLE_EQ(IidLaw::gaussian(2.0).cumulant(4), 0.0);
  EXPECT_NEAR(IidLaw::rademacher().cumulant(4), -2.0, 1e-12);
  EXPECT_NEAR(IidLaw::rademacher().cumulant(6), 16.0, 1e-10);
  // Uniform[-1, 1]: kappa_4 = -2/15.
  EXPECT_NEAR(IidLaw::uniform(1.0).cumulant(4), -2.0 / 15.0, 1e-12);
  EXPECT_NEAR(IidLaw::uniform(1.0).cumulant(2), 1.0 / 3.0, 1e-15);
}

TEST(IidLaw, ParameterValidation) {
  EXPECT_THROW(IidLaw::gaussian(0.0), ValidationError);
  EXPECT_THROW(IidLaw::uniform(-1.0), ValidationError);
  EXPECT_THROW(IidLaw::two_point(1.0, 2.0), ValidationError);
  EXPECT_THROW(IidLaw::gaussian().moment(13), ValidationError);
}

TEST(Truncation, UniformClosedFormMatchesQuadrature) {
  const auto u = IidLaw::uniform(2.0);
  const auto m = u.truncation(1.0);
  const double e1 = simpson([](double x) { return x / 4.0; }, 1, 2);
  const double e2 = simpson([](double x) { return x * x / 4.0; }, 1, 2);
  EXPECT_NEAR(m.tail_mean, e1, 1e-12);
  EXPECT_NEAR(m.tail_second_moment, e2, 1e-12);
  EXPECT_NEAR(m.tail_variance, 85.0 / 192.0, 1e-14);
  EXPECT_NEAR(m.bounded_mean + m.tail_mean, 0.0, 1e-15);
}

TEST(Truncation, GaussianClosedFormMatchesQuadrature) {
  const auto g = IidLaw::gaussian(2.0);
  for (double level : {-1.0, 0.0, 0.7, 2.5}) {
    const auto m = g.truncation(level);
    const double e1 = simpson([](double x) { return x * gaussian_density(x, 2.0); }, level, 40);
    const double e2 = simpson([](double x) { return x * x * gaussian_density(x, 2.0); }, level, 40);
    EXPECT_NEAR(m.tail_mean, e1, 1e-10) << level;
    EXPECT_NEAR(m.tail_second_moment, e2, 1e-10) << level;
    EXPECT_NEAR(m.tail_variance, e2 - e1 * e1, 1e-10);
  }
}

TEST(Truncation, AboveBoundTailVanishes) {
  const auto m = IidLaw::rademacher().truncation(1.0);
  EXPECT_EQ(m.tail_mean, 0.0);
  EXPECT_EQ(m.tail_variance, 0.0);
  EXPECT_EQ(IidLaw::uniform(1.0).truncation(5.0).tail_second_moment, 0.0);
}

TEST(Truncation, TailVarianceNotMonotoneButSecondMomentIs) {
  const auto u = IidLaw::uniform(2.0);
  EXPECT_LT(u.truncation(0.0).tail_variance, u.truncation(1.0).tail_variance);
  double prev = INFINITY;
  for (double l = -2.5; l <= 2.5; l += 0.25) {
    const double t = u.truncation(l).tail_second_moment;
    EXPECT_LE(t, prev);
    prev = t;
  }
}

TEST(MovingAverage, PartsAndSums) {
  MovingAverage ma;
  ma.coefficients = {{{0, 0}, 1.0}, {{1, 0}, -0.5}, {{0, 2}, 0.25}};
  EXPECT_DOUBLE_EQ(ma.coefficient_sum(), 0.75);
  EXPECT_EQ(ma.positive_part().coefficients.size(), 2u);
  EXPECT_EQ(ma.negative_part().coefficients.size(), 1u);
  EXPECT_DOUBLE_EQ(ma.negative_part().coefficients.at({1, 0}), 0.5);
  EXPECT_EQ(ma.radius(), 2);
}

TEST(ExactCorrelation, MovingAverageMatchesConvolution) {
  MovingAverage ma;
  ma.coefficients = {{{0, 0}, 1.0}, {{1, 0}, -0.5}, {{1, 1}, 0.25}};
  ma.base = IidLaw::gaussian(2.0);
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y) {
      double brute = 0.0;
      for (const auto& [qa, a] : ma.coefficients)
        for (const auto& [qb, b] : ma.coefficients)
          if (qa - qb == Point{x, y}) brute += a * b;
      EXPECT_NEAR(exact_correlation(ma, {x, y}), 2.0 * brute, 1e-15);
    }
  EXPECT_DOUBLE_EQ(exact_correlation(IidLaw::rademacher(3.0), {0, 0}), 3.0);
  EXPECT_DOUBLE_EQ(exact_correlation(IidLaw::rademacher(3.0), {1, 0}), 0.0);
}

TEST(SampleScenery, IidDeterministicAndMoments) {
  const auto keys = box(40);
  const SceneryModel law = IidLaw::uniform(1.0);
  RandomStream a(1, 1), b(1, 1);
  const auto x = sample_scenery(keys, law, a);
  EXPECT_EQ(x.values, sample_scenery(keys, law, b).values);
  double m2 = 0.0;
  for (double v : x.values) {
    ASSERT_LE(std::abs(v), 1.0);
    m2 += v * v;
  }
  m2 /= x.values.size();
  EXPECT_NEAR(m2, 1.0 / 3.0, 4.0 * std::sqrt((1.0 / 5 - 1.0 / 9) / x.values.size()));
}

TEST(SampleScenery, MovingAverageEmpiricalCorrelation) {
  MovingAverage ma;
  ma.coefficients = {{{0, 0}, 1.0}, {{1, 0}, 0.5}};
  const SceneryModel model = ma;
  const auto keys = box(60);
  RandomStream s(4, 4);
  const auto x = sample_scenery(keys, model, s);
  double c0 = 0, c1 = 0;
  int n = 0;
  for (int i = -59; i <= 59; ++i)
    for (int j = -59; j <= 59; ++j) {
      c0 += x.at({i, j}) * x.at({i, j});
      c1 += x.at({i + 1, j}) * x.at({i, j});
      ++n;
    }
  EXPECT_NEAR(c0 / n, 1.25, 0.08);
  EXPECT_NEAR(c1 / n, 0.5, 0.06);
}

TEST(SampleScenery, ToralMatchesDirectEvaluation) {
  const ToralModel model{ToralAction::reference_example(), TrigPolynomial(3).add_cosine({1, 0, 0}, 2.0)};
  const auto keys = box(3);
  RandomStream s(6, 6);
  const auto x = sample_scenery(keys, model, s);
  // Recover the point the sampler drew from a copy of the stream.
  RandomStream t(6, 6);
  std::vector<std::uint64_t> p(3);
  for (auto& c : p) c = t.uniform_below(model.modulus);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    EXPECT_NEAR(x.values[i], toral_value(model, p, unpack_site(keys[i])).real(), 1e-12);
  }
}

TEST(ToralModel, ReferenceCorrelationsAndCoboundary) {
  const auto action = ToralAction::reference_example();
  const ToralModel f{action, TrigPolynomial(3).add_cosine({1, 0, 0}, 2.0)};
  EXPECT_NEAR(exact_correlation(f, {0, 0}), 2.0, 1e-15);
  const auto window = toral_correlation_window(f, 3);
  double off = 0.0;
  for (double v : window) off += std::abs(v);
  EXPECT_NEAR(off, 2.0, 1e-15);

  const auto g = coboundary(TrigPolynomial(3).add_cosine({1, 0, 0}, 2.0), 1, action);
  const ToralModel cob{action, g};
  double sum = 0.0;
  for (double v : toral_correlation_window(cob, 20)) sum += v;
  EXPECT_EQ(sum, 0.0);
  EXPECT_NEAR(exact_correlation(cob, {0, 0}), 4.0, 1e-14);
}

TEST(ToralModel, ValuesAreRealAtRationalPoints) {
  const ToralModel f{ToralAction::reference_example(),
                     TrigPolynomial(3).add_cosine({1, 0, 0}, 1.0).add_sine({0, 1, -1}, 0.5)};
  RandomStream s(2, 2);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint64_t> p(3);
    for (auto& c : p) c = s.uniform_below(f.modulus);
    EXPECT_NEAR(toral_value(f, p, {i % 7 - 3, i % 5 - 2}).imag(), 0.0, 1e-12);
  }
}

TEST(ValidateModel, Errors) {
  auto code = [](const SceneryModel& m) {
    try {
      validate_model(m);
    } catch (const ValidationError& e) {
      return e.code();
    }
    return std::string("ok");
  };
  EXPECT_EQ(code(MovingAverage{}), "empty_filter");
  ToralModel bad{ToralAction::reference_example(), TrigPolynomial(3).add_cosine({1, 0, 0}, 1.0), 1000};
  EXPECT_EQ(code(bad), "modulus_not_prime");
  ToralModel dim{ToralAction::reference_example(), TrigPolynomial(2).add_cosine({1, 0}, 1.0)};
  EXPECT_EQ(code(dim), "frequency_dimension");
  EXPECT_EQ(code(IidLaw::gaussian()), "ok");
}

TEST(WeightedSum, MatchesManualSum) {
  const auto w = OccupationField::from_counts({{{0, 0}, 3}, {{1, 0}, 2}});
  SceneryField x;
  x.keys = {pack_site({0, 0}), pack_site({1, 0}), pack_site({2, 0})};
  std::sort(x.keys.begin(), x.keys.end());
  x.values = {0.5, -1.0, 7.0};
  EXPECT_DOUBLE_EQ(weighted_sum(w, x), 3 * 0.5 + 2 * -1.0);
  EXPECT_THROW(x.at({5, 5}), std::out_of_range);
}
