#include "rwrs/integer_matrix.hpp"

#include <algorithm>
#include <random>

#include <boost/multiprecision/miller_rabin.hpp>

namespace rwrs {

IntMatrix::IntMatrix(std::size_t n) : n_(n), a_(n * n, BigInt(0)) {}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw ValidationError("matrix_shape", "matrix has no rows");
  IntMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw ValidationError("matrix_shape", "matrix is not square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  IntMatrix r(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < n_; ++k) {
      const BigInt& aik = (*this)(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
    }
  }
  return r;
}

IntVector IntMatrix::operator*(const IntVector& v) const {
  IntVector r(n_, BigInt(0));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
  }
  return r;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
  IntMatrix r(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
  return r;
}

IntMatrix IntMatrix::scaled(const BigInt& s) const {
  IntMatrix r(*this);
  for (auto& x : r.a_) x *= s;
  return r;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

BigInt IntMatrix::trace() const {
  BigInt t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

BigInt IntMatrix::determinant() const {
  if (n_ == 0) return 1;
  std::vector<BigInt> m = a_;
  auto at = [&](std::size_t i, std::size_t j) -> BigInt& { return m[i * n_ + j]; };
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n_; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n_ && at(swap_row, k) == 0) ++swap_row;
      if (swap_row == n_) return 0;
      for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(swap_row, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n_; ++i) {
      for (std::size_t j = k + 1; j < n_; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
      }
    }
    prev = at(k, k);
  }
  return sign * at(n_ - 1, n_ - 1);
}

IntMatrix IntMatrix::adjugate() const {
  IntMatrix adj(n_);
  if (n_ == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      IntMatrix minor(n_ - 1);
      for (std::size_t r = 0, mr = 0; r < n_; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0, mc = 0; c < n_; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = (*this)(r, c);
        }
        ++mr;
      }
      const BigInt cof = ((i + j) % 2 == 0 ? 1 : -1) * minor.determinant();
      adj(j, i) = cof;
    }
  }
  return adj;
}

IntMatrix IntMatrix::unimodular_inverse() const {
  const BigInt det = determinant();
  if (det != 1 && det != -1) {
    throw ValidationError("not_unimodular", "matrix determinant is " + det.str() + ", not +-1");
  }
  return adjugate().scaled(det);
}

IntMatrix IntMatrix::power(std::int64_t e) const {
  IntMatrix base = e < 0 ? unimodular_inverse() : *this;
  auto k = static_cast<std::uint64_t>(e < 0 ? -e : e);
  IntMatrix result = identity(n_);
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

std::vector<BigInt> IntMatrix::characteristic_polynomial() const {
  // Faddeev-LeVerrier: M_1 = I, c_{n-1} = -tr(A);
  // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k (exact over Z).
  std::vector<BigInt> c(n_ + 1, BigInt(0));
  c[n_] = 1;
  IntMatrix m = identity(n_);
  for (std::size_t k = 1; k <= n_; ++k) {
    const IntMatrix am = (*this) * m;
    c[n_ - k] = -am.trace() / static_cast<long>(k);
    m = am + identity(n_).scaled(c[n_ - k]);
  }
  return c;
}

std::vector<double> IntMatrix::to_doubles() const {
  std::vector<double> out;
  out.reserve(a_.size());
  for (const auto& x : a_) out.push_back(static_cast<double>(x));
  return out;
}

namespace {

Polynomial trim(Polynomial p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  return p;
}

// Quotient and remainder of p by a monic divisor.
std::pair<Polynomial, Polynomial> divide_monic(Polynomial p, const Polynomial& d) {
  p = trim(std::move(p));
  const std::size_t dd = d.size() - 1;
  if (p.size() - 1 < dd) return {Polynomial{0}, p};
  Polynomial q(p.size() - dd, BigInt(0));
  for (std::size_t i = p.size(); i-- > dd;) {
    const BigInt coef = p[i];
    if (coef == 0) continue;
    q[i - dd] = coef;
    for (std::size_t j = 0; j <= dd; ++j) p[i - dd + j] -= coef * d[j];
  }
  p.resize(dd == 0 ? 1 : dd);
  return {trim(q), trim(p)};
}

}  // namespace

unsigned euler_phi(unsigned m) {
  unsigned result = m;
  unsigned n = m;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

Polynomial cyclotomic_polynomial(unsigned m) {
  // x^m - 1 divided by every Phi_d with d | m, d < m.
  Polynomial p(m + 1, BigInt(0));
  p[0] = -1;
  p[m] = 1;
  for (unsigned d = 1; d < m; ++d) {
    if (m % d == 0) p = divide_monic(p, cyclotomic_polynomial(d)).first;
  }
  return p;
}

bool divides(const Polynomial& divisor, const Polynomial& p) {
  const auto r = divide_monic(p, divisor).second;
  return r.size() == 1 && r[0] == 0;
}

std::vector<unsigned> root_of_unity_orders(const Polynomial& p) {
  const auto degree = static_cast<unsigned>(trim(p).size() - 1);
  std::vector<unsigned> orders;
  // phi(m) >= sqrt(m / 2), so phi(m) <= degree forces m <= 2 degree^2.
  const unsigned limit = 2 * degree * degree + 2;
  for (unsigned m = 1; m <= limit; ++m) {
    if (euler_phi(m) > degree) continue;
    if (divides(cyclotomic_polynomial(m), p)) orders.push_back(m);
  }
  return orders;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

std::uint64_t reduce_mod(const BigInt& v, std::uint64_t q) {
  BigInt r = v % q;
  if (r < 0) r += q;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t reduce_mod(std::int64_t v, std::uint64_t q) {
  const auto sq = static_cast<__int128>(q);
  __int128 r = static_cast<__int128>(v) % sq;
  if (r < 0) r += sq;
  return static_cast<std::uint64_t>(r);
}

bool is_prime_u64(std::uint64_t n) {
  // Fixed seed keeps the verdict reproducible; 25 rounds bound the error by 4^-25.
  std::mt19937_64 gen(0x9e3779b97f4a7c15ull ^ n);
  return boost::multiprecision::miller_rabin_test(BigInt(n), 25, gen);
}

ModMatrix::ModMatrix(const IntMatrix& m, std::uint64_t q) : n_(m.size()), q_(q), a_(n_ * n_) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) a_[i * n_ + j] = reduce_mod(m(i, j), q);
  }
}

ModMatrix ModMatrix::identity(std::size_t n, std::uint64_t q) {
  ModMatrix m;
  m.n_ = n;
  m.q_ = q;
  m.a_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) m.a_[i * n + i] = 1 % q;
  return m;
}

ModMatrix ModMatrix::operator*(const ModMatrix& o) const {
  ModMatrix r = identity(n_, q_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      unsigned __int128 acc = 0;
      for (std::size_t k = 0; k < n_; ++k) {
        acc += static_cast<unsigned __int128>(a_[i * n_ + k]) * o.a_[k * n_ + j] % q_;
      }
      r.a_[i * n_ + j] = static_cast<std::uint64_t>(acc % q_);
    }
  }
  return r;
}

void ModMatrix::apply(const std::uint64_t* in, std::uint64_t* out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    unsigned __int128 acc = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      acc += static_cast<unsigned __int128>(a_[i * n_ + k]) * in[k] % q_;
    }
    out[i] = static_cast<std::uint64_t>(acc % q_);
  }
}

ModMatrix ModMatrix::power(std::uint64_t e) const {
  ModMatrix result = identity(n_, q_);
  ModMatrix base = *this;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

}  // namespace rwrs
