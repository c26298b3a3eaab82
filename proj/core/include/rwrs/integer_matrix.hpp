#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "rwrs/types.hpp"

namespace rwrs {

using IntVector = std::vector<BigInt>;

/// Square matrix over Z with arbitrary-precision entries.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(std::size_t n);
  static IntMatrix identity(std::size_t n);
  /// Throws ValidationError("matrix_shape") unless `rows` is square and nonempty.
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  std::size_t size() const { return n_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const;
  IntVector operator*(const IntVector& v) const;
  IntMatrix operator+(const IntMatrix& o) const;
  IntMatrix scaled(const BigInt& s) const;
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  IntMatrix transpose() const;
  BigInt trace() const;
  BigInt determinant() const;  // fraction-free Bareiss elimination
  IntMatrix adjugate() const;
  /// Exact inverse; throws ValidationError("not_unimodular") unless |det| = 1.
  IntMatrix unimodular_inverse() const;
  /// A^e for any integer e; negative e requires |det| = 1.
  IntMatrix power(std::int64_t e) const;

  /// Coefficients of det(xI - A), lowest degree first (monic, degree n).
  std::vector<BigInt> characteristic_polynomial() const;

  std::vector<double> to_doubles() const;  // row-major

 private:
  std::size_t n_ = 0;
  std::vector<BigInt> a_;
};

using Polynomial = std::vector<BigInt>;  // lowest degree first

/// The m-th cyclotomic polynomial.
Polynomial cyclotomic_polynomial(unsigned m);
unsigned euler_phi(unsigned m);
/// True iff monic `divisor` divides `p` over Z.
bool divides(const Polynomial& divisor, const Polynomial& p);
/// Orders m of the roots of unity that are roots of `p`, among all m with
/// phi(m) <= degree(p).
std::vector<unsigned> root_of_unity_orders(const Polynomial& p);

/// Arithmetic modulo a prime q < 2^63.
std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q);
std::uint64_t reduce_mod(const BigInt& v, std::uint64_t q);
std::uint64_t reduce_mod(std::int64_t v, std::uint64_t q);
bool is_prime_u64(std::uint64_t n);

/// Square matrix with entries in Z/q.
class ModMatrix {
 public:
  ModMatrix() = default;
  ModMatrix(const IntMatrix& m, std::uint64_t q);
  static ModMatrix identity(std::size_t n, std::uint64_t q);

  std::size_t size() const { return n_; }
  std::uint64_t modulus() const { return q_; }
  std::uint64_t operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  ModMatrix operator*(const ModMatrix& o) const;
  void apply(const std::uint64_t* in, std::uint64_t* out) const;
  ModMatrix power(std::uint64_t e) const;  // binary exponentiation

 private:
  std::size_t n_ = 0;
  std::uint64_t q_ = 0;
  std::vector<std::uint64_t> a_;
};

}  // namespace rwrs
