#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rwrs/occupation.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/trig_polynomial.hpp"

namespace rwrs {

/// Correlations <T^l f, f> for |l| <= radius (sup norm), symmetrized, plus an
/// upper bound on the l1 mass of the correlations outside the window.
struct CorrelationTable {
  int radius = 0;
  std::vector<double> values;  // index (x + R) (2R + 1) + (y + R)
  double tail_bound = 0.0;

  /// True when every omitted correlation is provably zero.
  bool certified() const { return tail_bound == 0.0; }
  double at(Point l) const;  // 0 outside the window
  /// sum_l <T^l f, f> over the window, i.e. phi_f(0) up to the tail bound.
  double window_sum() const;
  std::vector<Point> support() const;  // window points with a nonzero value
};

/// IID: variance at 0. Moving average: the full finite correlation, with the
/// exact omitted mass as tail bound when the window is too small. Toral:
/// exact window sums, tail bounded by the coefficient pairs whose orbit
/// relation is not located inside the window.
CorrelationTable correlation_table(const SceneryModel& model, int radius = 20);

struct SpectralValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// phi_f(t) for t in T^2.
SpectralValue spectral_density_eval(const SceneryModel& model, std::array<double, 2> t,
                                    int radius = 20);
SpectralValue spectral_density_eval(const CorrelationTable& table, std::array<double, 2> t);

/// phi_f(0) C0, the limit of Var(S_n) / (n ln n) under delta_0-regularity.
SpectralValue asymptotic_variance(const SceneryModel& model, double c0, int radius = 20);

struct WeightedField {
  const OccupationField* field = nullptr;
  double weight = 1.0;
};

struct VarianceResult {
  double value = 0.0;
  double error_bound = 0.0;
  bool exact = true;  // false when the table has a nonzero tail
};

/// Var(sum_j a_j S_{I_j}) = sum_{j,j'} a_j a_j' sum_p V(I_j, I_j', p) phi^(p)
/// with p over the table window.
VarianceResult variance_exact(std::span<const WeightedField> fields, const CorrelationTable& table);

/// Cov(S_I, S_J) = sum_p V(I, J, p) phi^(p).
double covariance_exact(const OccupationField& w_i, const OccupationField& w_j,
                        const CorrelationTable& table);

/// An infinite Fourier coefficient rule on Z^rho.
class CoefficientRule {
 public:
  virtual ~CoefficientRule() = default;
  virtual int dimension() const = 0;
  virtual std::complex<double> coefficient(const Frequency& k) const = 0;
  /// Upper bound on sum_{|k| > radius} |c(k)| (sup norm); +inf when the rule
  /// is not summable.
  virtual double tail_bound(int radius) const = 0;
  /// Radius of a finite support, if any.
  virtual std::optional<int> support_radius() const { return std::nullopt; }
};

/// c(k) = amplitude * |k|_2^{-beta}, real and even.
class PowerDecayRule : public CoefficientRule {
 public:
  PowerDecayRule(int dimension, double beta, double amplitude = 1.0);
  int dimension() const override { return dim_; }
  std::complex<double> coefficient(const Frequency& k) const override;
  double tail_bound(int radius) const override;

 private:
  int dim_;
  double beta_;
  double amplitude_;
};

/// A trigonometric polynomial seen as a rule.
class FinitePolynomialRule : public CoefficientRule {
 public:
  explicit FinitePolynomialRule(TrigPolynomial f);
  int dimension() const override { return f_.dimension(); }
  std::complex<double> coefficient(const Frequency& k) const override;
  double tail_bound(int radius) const override;
  std::optional<int> support_radius() const override;

 private:
  TrigPolynomial f_;
};

struct Ac0Truncation {
  TrigPolynomial polynomial;
  int radius = 0;
  double tail_bound = 0.0;  // sum of omitted |c(k)|; tail_bound^2 <= epsilon
};

/// Smallest sup-norm ball whose complement has (l1 tail)^2 <= epsilon.
/// Throws ValidationError("not_summable") or ("truncation_too_large").
Ac0Truncation ac0_truncate(const CoefficientRule& rule, double epsilon,
                           std::size_t max_terms = 2'000'000);

}  // namespace rwrs
