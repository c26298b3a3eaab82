#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "rwrs/integer_matrix.hpp"
#include "rwrs/trig_polynomial.hpp"
#include "rwrs/types.hpp"

namespace rwrs {

/// Common eigen-structure of the transposed generators. When `simple`, the
/// columns of U diagonalize both A1^T and A2^T, with A_j^T u_i = alpha(i, j) u_i.
struct ActionSpectrum {
  bool simple = false;
  std::vector<std::array<std::complex<double>, 2>> eigenvalues;
  std::vector<std::complex<double>> basis_inverse;  // U^{-1}, row-major
};

enum class OrbitMatch { kFound, kNone, kUnknown };

/// Outcome of solving (A^l)^T m = k for l in Z^2.
struct PairLocation {
  OrbitMatch status = OrbitMatch::kUnknown;
  Point exponent;  // meaningful when status == kFound
};

/// The Z^2-action l -> A^l = A1^{l.x} A2^{l.y} of two commuting matrices in
/// GL(rho, Z) on the torus T^rho. Observables transform as T^l f = f o A^l, so
/// a frequency k is carried to (A^l)^T k.
///
/// The constructor only checks shapes; use verify_action for the full checks.
class ToralAction {
 public:
  ToralAction(IntMatrix a1, IntMatrix a2);

  int dimension() const { return static_cast<int>(a1_.size()); }
  const IntMatrix& a1() const { return a1_; }
  const IntMatrix& a2() const { return a2_; }
  const ActionSpectrum& spectrum() const { return spectrum_; }

  IntMatrix power(Point l) const;
  IntMatrix transposed_power(Point l) const;
  ModMatrix power_mod(Point l, std::uint64_t q) const;
  /// Generator powers mod q, A_j^e for e in [lo, hi]; index e - lo.
  std::vector<ModMatrix> generator_powers_mod(int which, std::int64_t lo, std::int64_t hi,
                                              std::uint64_t q) const;

  /// (A^l)^T k, exact.
  IntVector transported_frequency(const IntVector& k, Point l) const;
  IntVector transported_frequency(const Frequency& k, Point l) const;

  /// Distance from the unit circle of the closest eigenvalue modulus of A^l,
  /// from the generator eigenvalues when the spectrum is simple.
  double unit_circle_distance(Point l) const;

  /// Finds the unique l with (A^l)^T m = k, proves there is none, or gives up.
  /// Candidates are always confirmed in exact arithmetic.
  PairLocation locate(const Frequency& m, const Frequency& k) const;

  /// The commuting pair of 3x3 matrices used throughout as the reference
  /// example of a totally ergodic action.
  static ToralAction reference_example();

 private:
  IntMatrix a1_, a2_;
  IntMatrix a1_inv_, a2_inv_;
  IntMatrix a1t_, a2t_, a1t_inv_, a2t_inv_;
  ActionSpectrum spectrum_;
};

struct ActionReport {
  int dimension = 0;
  int check_radius = 0;
  bool commute = false;
  BigInt det1 = 0;
  BigInt det2 = 0;
  bool unimodular = false;
  bool unit_circle_free = false;
  bool spectrum_simple = false;
  double min_unit_circle_distance = 0.0;
  /// First exponent in the window with an eigenvalue on (or within tolerance
  /// of) the unit circle, and the root-of-unity orders found exactly there.
  std::optional<Point> offending_exponent;
  std::vector<unsigned> root_of_unity_orders;

  bool ok() const { return commute && unimodular && unit_circle_free; }
};

inline constexpr double kUnitCircleTolerance = 1e-8;

/// Exact commutation and determinant checks, then for every 0 < |l| <= radius
/// a numerical eigenvalue screen plus an exact test that no cyclotomic
/// polynomial of degree <= rho divides char(A^l). Throws only on shape errors.
ActionReport inspect_action(const IntMatrix& a1, const IntMatrix& a2, int check_radius = 12);

/// inspect_action, then throws ValidationError "not_commuting",
/// "not_unimodular" or "unit_circle_eigenvalue" on failure.
ToralAction verify_action(const IntMatrix& a1, const IntMatrix& a2, int check_radius = 12);

}  // namespace rwrs
