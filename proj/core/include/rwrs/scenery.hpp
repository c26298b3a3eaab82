#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rwrs/occupation.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/toral_action.hpp"
#include "rwrs/trig_polynomial.hpp"
#include "rwrs/types.hpp"

namespace rwrs {

enum class IidKind { kRademacher, kUniform, kGaussian, kTwoPoint };

/// Closed-form moments of the one-sided truncation X = Xhat + Xtilde with
/// Xhat = X 1{X <= L} - E[.] and Xtilde = X 1{X > L} - E[.].
struct TruncationMoments {
  double level = 0.0;
  double bounded_mean = 0.0;        // E[X 1{X <= L}]
  double tail_mean = 0.0;           // E[X 1{X > L}]
  double bounded_variance = 0.0;    // Var(Xhat)
  double tail_variance = 0.0;       // Var(Xtilde)
  double tail_second_moment = 0.0;  // E[X^2 1{X > L}], nonincreasing in L
};

/// Centered law of a single scenery variable.
class IidLaw {
 public:
  static IidLaw rademacher(double variance = 1.0);
  /// Uniform on [-h, h].
  static IidLaw uniform(double half_width);
  static IidLaw gaussian(double variance = 1.0);
  /// Takes `low` < 0 < `high`, with probabilities making the mean zero.
  static IidLaw two_point(double low, double high);

  IidKind kind() const { return kind_; }
  std::string name() const;
  double variance() const { return moment(2); }
  /// E X^j for 0 <= j <= 12, closed form.
  double moment(int j) const;
  /// r-th cumulant from the moments (standard recursion).
  double cumulant(int r) const;
  /// Largest |X| on the support; infinity for the Gaussian.
  double bound() const;

  TruncationMoments truncation(double level) const;
  double sample(RandomStream& stream) const;

  double low() const { return a_; }
  double high() const { return b_; }

 private:
  IidLaw(IidKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  IidKind kind_;
  double a_;  // scale (Rademacher amplitude, uniform half width, Gaussian sd) or low point
  double b_;  // high point for two-point laws
};

/// Xi_l = sum_q a_q X_{l - q} over an iid base field.
struct MovingAverage {
  std::map<Point, double> coefficients;
  IidLaw base = IidLaw::gaussian();

  double coefficient_sum() const;
  /// Filters with a_q^+ = max(a_q, 0) and a_q^- = max(-a_q, 0); fields built
  /// from nonnegative filters of independent variables are associated.
  MovingAverage positive_part() const;
  MovingAverage negative_part() const;
  int radius() const;  // largest |q| in the coefficient support
};

inline constexpr std::uint64_t kDefaultToralModulus = (std::uint64_t{1} << 61) - 1;

/// X_l(x) = f(A^l x) on the torus, sampled at rational points p / q.
struct ToralModel {
  ToralAction action;
  TrigPolynomial observable;
  std::uint64_t modulus = kDefaultToralModulus;
};

using SceneryModel = std::variant<IidLaw, MovingAverage, ToralModel>;

/// Throws ValidationError: "modulus_not_prime", "frequency_dimension",
/// "empty_filter", "law_parameter".
void validate_model(const SceneryModel& model);

std::string model_kind(const SceneryModel& model);

/// Scenery values on a sorted set of sites.
struct SceneryField {
  std::vector<SiteKey> keys;  // sorted, unique
  std::vector<double> values;

  double at(Point p) const;  // throws std::out_of_range if absent
};

/// Sorted union of the supports of several occupation fields.
std::vector<SiteKey> union_support(std::span<const OccupationField* const> fields);

/// Draws the scenery on `support` (sorted, unique). Deterministic in
/// (model, support, stream).
SceneryField sample_scenery(std::span<const SiteKey> support, const SceneryModel& model,
                            RandomStream& stream);

/// sum_l w(l) X_l; every site of w must be present in x.
double weighted_sum(const OccupationField& w, const SceneryField& x);

/// f(y / q) for y in (Z/q)^rho, with exact phase reduction mod q.
class ToralEvaluator {
 public:
  ToralEvaluator(const TrigPolynomial& f, std::uint64_t modulus);
  std::complex<double> operator()(const std::uint64_t* y) const;

 private:
  std::uint64_t q_;
  std::vector<std::vector<std::uint64_t>> residues_;
  std::vector<std::complex<double>> coefficients_;
};

/// Complex value f((A^l p mod q) / q) for an explicit point p in (Z/q)^rho.
std::complex<double> toral_value(const ToralModel& model, std::span<const std::uint64_t> point,
                                 Point l);

/// <T^l f, f> = E[X_l X_0].
double exact_correlation(const SceneryModel& model, Point l);

/// Toral correlations for all |l| <= radius, indexed by (x + radius) * (2 radius + 1) + (y + radius).
std::vector<double> toral_correlation_window(const ToralModel& model, int radius);

/// f = g - g o A_direction.
TrigPolynomial coboundary(const TrigPolynomial& g, int direction, const ToralAction& action);

}  // namespace rwrs
