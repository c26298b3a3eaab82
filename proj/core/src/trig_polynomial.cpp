#include "rwrs/trig_polynomial.hpp"

#include <cmath>
#include <numbers>

#include "rwrs/types.hpp"

namespace rwrs {

Frequency negate(const Frequency& k) {
  Frequency out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = -k[i];
  return out;
}

TrigPolynomial::TrigPolynomial(int dimension) : dim_(dimension) {
  if (dimension < 1) throw ValidationError("frequency_dimension", "dimension must be >= 1");
}

void TrigPolynomial::check_frequency(const Frequency& k) const {
  if (static_cast<int>(k.size()) != dim_) {
    throw ValidationError("frequency_dimension", "frequency has " + std::to_string(k.size()) +
                                                     " entries, expected " + std::to_string(dim_));
  }
  bool zero = true;
  for (auto v : k) zero = zero && v == 0;
  if (zero) throw ValidationError("zero_frequency", "observable must have zero mean");
}

void TrigPolynomial::add_term(const Frequency& k, std::complex<double> c) {
  auto [it, inserted] = terms_.emplace(k, c);
  if (!inserted) it->second += c;
  if (it->second == std::complex<double>(0.0, 0.0)) terms_.erase(it);
}

TrigPolynomial TrigPolynomial::from_terms(int dimension,
                                          const std::map<Frequency, std::complex<double>>& terms) {
  TrigPolynomial f(dimension);
  for (const auto& [k, c] : terms) {
    f.check_frequency(k);
    const auto it = terms.find(negate(k));
    if (it == terms.end() || it->second != std::conj(c)) {
      throw ValidationError("not_hermitian", "coefficients must satisfy c(-k) = conj(c(k))");
    }
    if (c != std::complex<double>(0.0, 0.0)) f.terms_.emplace(k, c);
  }
  return f;
}

TrigPolynomial& TrigPolynomial::add_pair(const Frequency& k, std::complex<double> c) {
  check_frequency(k);
  add_term(k, c);
  add_term(negate(k), std::conj(c));
  return *this;
}

TrigPolynomial& TrigPolynomial::add_cosine(const Frequency& k, double amplitude) {
  return add_pair(k, {amplitude / 2.0, 0.0});
}

TrigPolynomial& TrigPolynomial::add_sine(const Frequency& k, double amplitude) {
  // sin(t) = (e^{it} - e^{-it}) / 2i
  return add_pair(k, {0.0, -amplitude / 2.0});
}

std::complex<double> TrigPolynomial::coefficient(const Frequency& k) const {
  const auto it = terms_.find(k);
  return it == terms_.end() ? std::complex<double>{} : it->second;
}

double TrigPolynomial::l1_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += std::abs(c);
  return s;
}

double TrigPolynomial::l2_norm_squared() const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += std::norm(c);
  return s;
}

std::complex<double> TrigPolynomial::evaluate(std::span<const double> x) const {
  std::complex<double> s = 0.0;
  for (const auto& [k, c] : terms_) {
    double phase = 0.0;
    for (int i = 0; i < dim_; ++i) phase += static_cast<double>(k[i]) * x[i];
    phase -= std::floor(phase);
    s += c * std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  return s;
}

TrigPolynomial TrigPolynomial::operator+(const TrigPolynomial& o) const {
  if (o.dim_ != dim_) throw ValidationError("frequency_dimension", "dimension mismatch");
  TrigPolynomial r(*this);
  for (const auto& [k, c] : o.terms_) r.add_term(k, c);
  return r;
}

TrigPolynomial TrigPolynomial::operator-(const TrigPolynomial& o) const {
  return *this + o.scaled(-1.0);
}

TrigPolynomial TrigPolynomial::scaled(double s) const {
  TrigPolynomial r(dim_);
  if (s == 0.0) return r;
  for (const auto& [k, c] : terms_) r.terms_.emplace(k, c * s);
  return r;
}

}  // namespace rwrs
