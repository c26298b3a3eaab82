#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace rwrs {

/// A frequency k in Z^rho.
using Frequency = std::vector<std::int64_t>;

/// f(x) = sum_k c(k) exp(2 pi i <k, x>) on the torus T^rho, with finitely many
/// nonzero c(k) and no constant term.
///
/// Terms added through add_cosine/add_sine are Hermitian by construction, so f
/// is real-valued.
class TrigPolynomial {
 public:
  explicit TrigPolynomial(int dimension);

  /// Throws ValidationError("zero_frequency") for a constant term,
  /// ("frequency_dimension") on a length mismatch and ("not_hermitian") unless
  /// c(-k) == conj(c(k)) exactly.
  static TrigPolynomial from_terms(int dimension,
                                   const std::map<Frequency, std::complex<double>>& terms);

  /// Adds c e_k + conj(c) e_{-k}, keeping f real-valued.
  TrigPolynomial& add_pair(const Frequency& k, std::complex<double> c);
  /// Adds amplitude * cos(2 pi <k, x>).
  TrigPolynomial& add_cosine(const Frequency& k, double amplitude);
  /// Adds amplitude * sin(2 pi <k, x>).
  TrigPolynomial& add_sine(const Frequency& k, double amplitude);

  int dimension() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<Frequency, std::complex<double>>& terms() const { return terms_; }
  std::complex<double> coefficient(const Frequency& k) const;

  /// ||f||_c = sum_k |c(k)|.
  double l1_norm() const;
  /// sum_k |c(k)|^2 = E f^2.
  double l2_norm_squared() const;

  std::complex<double> evaluate(std::span<const double> x) const;

  TrigPolynomial operator+(const TrigPolynomial& o) const;
  TrigPolynomial operator-(const TrigPolynomial& o) const;
  TrigPolynomial scaled(double s) const;

 private:
  void add_term(const Frequency& k, std::complex<double> c);
  void check_frequency(const Frequency& k) const;

  int dim_;
  std::map<Frequency, std::complex<double>> terms_;
};

Frequency negate(const Frequency& k);

}  // namespace rwrs
