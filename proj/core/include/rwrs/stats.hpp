#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rwrs {

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& o);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Sample mean and the standard error of the mean.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanEstimate mean_estimate(std::span<const double> xs);

/// Sample variance and an estimate of its standard error,
/// sqrt((m4 - s^4) / n) with central moments m4 and s^2.
MeanEstimate variance_estimate(std::span<const double> xs);

double normal_cdf(double x);

/// P(K > lambda) for the Kolmogorov distribution:
/// 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;  // D_n
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1). The p-value uses the
/// asymptotic distribution at lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D_n.
KsResult ks_test_normal(std::vector<double> xs);

struct Interval01 {
  double lower = 0.0;
  double upper = 1.0;
  double half_width() const { return 0.5 * (upper - lower); }
};

/// Wilson score interval for a binomial proportion.
Interval01 wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Ordinary least squares y = intercept + slope x; needs >= 3 points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace rwrs
