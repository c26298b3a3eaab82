#include "rwrs/toral_action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace rwrs {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

Eigen::MatrixXd to_eigen(const IntMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = static_cast<double>(m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    }
  }
  return out;
}

ActionSpectrum joint_spectrum(const IntMatrix& a1t, const IntMatrix& a2t) {
  ActionSpectrum s;
  const Eigen::MatrixXd m1 = to_eigen(a1t);
  const Eigen::MatrixXd m2 = to_eigen(a2t);
  const auto n = m1.rows();
  for (double c : {0.7071067811865476, 1.6180339887498949, -0.3819660112501051, 2.718281828459045}) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m1 + c * m2);
    if (solver.info() != Eigen::Success) continue;
    const Eigen::VectorXcd values = solver.eigenvalues();
    const double scale = 1.0 + values.cwiseAbs().maxCoeff();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) gap = std::min(gap, std::abs(values(i) - values(j)));
    }
    if (gap < 1e-6 * scale) continue;

    const ComplexMatrix u = solver.eigenvectors();
    Eigen::FullPivLU<ComplexMatrix> lu(u);
    if (!lu.isInvertible()) continue;
    const ComplexMatrix u_inv = lu.inverse();
    s.eigenvalues.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXcd ui = u.col(i);
      const std::complex<double> norm = ui.squaredNorm();
      const std::complex<double> a1 = ui.dot(m1.cast<std::complex<double>>() * ui) / norm;
      const std::complex<double> a2 = ui.dot(m2.cast<std::complex<double>>() * ui) / norm;
      s.eigenvalues.push_back({a1, a2});
    }
    s.basis_inverse.assign(static_cast<std::size_t>(n * n), {});
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) s.basis_inverse[static_cast<std::size_t>(i * n + j)] = u_inv(i, j);
    }
    s.simple = true;
    return s;
  }
  return s;
}

IntMatrix generator_power(const IntMatrix& a, const IntMatrix& a_inv, std::int64_t e) {
  return e >= 0 ? a.power(e) : a_inv.power(-e);
}

bool fits_int64(const BigInt& v) {
  return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

ToralAction::ToralAction(IntMatrix a1, IntMatrix a2) : a1_(std::move(a1)), a2_(std::move(a2)) {
  if (a1_.size() == 0 || a1_.size() != a2_.size()) {
    throw ValidationError("matrix_shape", "generators must be square matrices of equal size");
  }
  a1_inv_ = a1_.unimodular_inverse();
  a2_inv_ = a2_.unimodular_inverse();
  a1t_ = a1_.transpose();
  a2t_ = a2_.transpose();
  a1t_inv_ = a1_inv_.transpose();
  a2t_inv_ = a2_inv_.transpose();
  spectrum_ = joint_spectrum(a1t_, a2t_);
}

ToralAction ToralAction::reference_example() {
  return ToralAction(IntMatrix::from_rows({{-3, -3, 1}, {10, 9, -3}, {-30, -26, 9}}),
                     IntMatrix::from_rows({{11, 1, -1}, {-10, -1, 1}, {10, 2, -1}}));
}

IntMatrix ToralAction::power(Point l) const {
  return generator_power(a1_, a1_inv_, l.x) * generator_power(a2_, a2_inv_, l.y);
}

IntMatrix ToralAction::transposed_power(Point l) const {
  // (A1^a A2^b)^T = (A2^T)^b (A1^T)^a, and the factors commute.
  return generator_power(a1t_, a1t_inv_, l.x) * generator_power(a2t_, a2t_inv_, l.y);
}

ModMatrix ToralAction::power_mod(Point l, std::uint64_t q) const {
  const ModMatrix p1 = ModMatrix(l.x >= 0 ? a1_ : a1_inv_, q).power(static_cast<std::uint64_t>(l.x >= 0 ? l.x : -l.x));
  const ModMatrix p2 = ModMatrix(l.y >= 0 ? a2_ : a2_inv_, q).power(static_cast<std::uint64_t>(l.y >= 0 ? l.y : -l.y));
  return p1 * p2;
}

std::vector<ModMatrix> ToralAction::generator_powers_mod(int which, std::int64_t lo, std::int64_t hi,
                                                         std::uint64_t q) const {
  const IntMatrix& fwd = which == 1 ? a1_ : a2_;
  const IntMatrix& inv = which == 1 ? a1_inv_ : a2_inv_;
  std::vector<ModMatrix> out;
  if (hi < lo) return out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  const ModMatrix step(fwd, q);
  ModMatrix current = lo >= 0 ? step.power(static_cast<std::uint64_t>(lo))
                              : ModMatrix(inv, q).power(static_cast<std::uint64_t>(-lo));
  for (std::int64_t e = lo; e <= hi; ++e) {
    out.push_back(current);
    current = current * step;
  }
  return out;
}

IntVector ToralAction::transported_frequency(const IntVector& k, Point l) const {
  if (k.size() != a1_.size()) throw ValidationError("frequency_dimension", "frequency size mismatch");
  return transposed_power(l) * k;
}

IntVector ToralAction::transported_frequency(const Frequency& k, Point l) const {
  IntVector v(k.begin(), k.end());
  return transported_frequency(v, l);
}

double ToralAction::unit_circle_distance(Point l) const {
  if (spectrum_.simple) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [alpha1, alpha2] : spectrum_.eigenvalues) {
      const double s = static_cast<double>(l.x) * std::log(std::abs(alpha1)) +
                       static_cast<double>(l.y) * std::log(std::abs(alpha2));
      best = std::min(best, std::abs(std::expm1(s)));
    }
    return best;
  }
  const Eigen::MatrixXd m = to_eigen(power(l));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    best = std::min(best, std::abs(std::abs(solver.eigenvalues()(i)) - 1.0));
  }
  return best;
}

PairLocation ToralAction::locate(const Frequency& m, const Frequency& k) const {
  const std::size_t n = a1_.size();
  if (m.size() != n || k.size() != n) throw ValidationError("frequency_dimension", "frequency size mismatch");
  if (m == k) return {OrbitMatch::kFound, {0, 0}};
  if (!spectrum_.simple) return {};

  auto coords = [&](const Frequency& v) {
    std::vector<std::complex<double>> c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) c[i] += spectrum_.basis_inverse[i * n + j] * static_cast<double>(v[j]);
    }
    return c;
  };
  auto norm = [](const Frequency& v) {
    double s = 0.0;
    for (auto x : v) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
  };
  const auto c = coords(m);
  const auto d = coords(k);
  const double nm = norm(m), nk = norm(k);

  // |d_i| = |c_i| |alpha_i^l| gives one linear equation in l per eigenvector.
  double ata[2][2] = {{0, 0}, {0, 0}}, atb[2] = {0, 0};
  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const bool c_zero = std::abs(c[i]) < 1e-9 * nm;
    const bool d_zero = std::abs(d[i]) < 1e-9 * nk;
    if (c_zero && !d_zero) return {OrbitMatch::kNone, {}};
    if (d_zero) continue;
    const double a0 = std::log(std::abs(spectrum_.eigenvalues[i][0]));
    const double a1 = std::log(std::abs(spectrum_.eigenvalues[i][1]));
    const double b = std::log(std::abs(d[i])) - std::log(std::abs(c[i]));
    rows.push_back({a0, a1, b});
    ata[0][0] += a0 * a0;
    ata[0][1] += a0 * a1;
    ata[1][1] += a1 * a1;
    atb[0] += a0 * b;
    atb[1] += a1 * b;
  }
  const double det = ata[0][0] * ata[1][1] - ata[0][1] * ata[0][1];
  const double scale = ata[0][0] * ata[1][1] + 1e-300;
  if (rows.empty() || std::abs(det) < 1e-10 * scale) return {};
  const double lx = (atb[0] * ata[1][1] - ata[0][1] * atb[1]) / det;
  const double ly = (ata[0][0] * atb[1] - ata[0][1] * atb[0]) / det;

  double residual = 0.0;
  for (const auto& r : rows) residual = std::max(residual, std::abs(r[0] * lx + r[1] * ly - r[2]));
  // An exact solution satisfies every equation up to rounding, so a large
  // residual or a non-integral least-squares point rules one out.
  if (residual > 1e-6) return {OrbitMatch::kNone, {}};
  const double rx = std::round(lx), ry = std::round(ly);
  if (std::abs(lx - rx) > 0.25 || std::abs(ly - ry) > 0.25) return {OrbitMatch::kNone, {}};
  constexpr double kMaxVerifiable = 4096.0;
  if (std::abs(rx) > kMaxVerifiable || std::abs(ry) > kMaxVerifiable) return {};

  const Point candidate{static_cast<std::int64_t>(rx), static_cast<std::int64_t>(ry)};
  const IntVector image = transported_frequency(m, candidate);
  for (std::size_t i = 0; i < n; ++i) {
    if (!fits_int64(image[i]) || image[i] != k[i]) return {OrbitMatch::kNone, {}};
  }
  return {OrbitMatch::kFound, candidate};
}

ActionReport inspect_action(const IntMatrix& a1, const IntMatrix& a2, int check_radius) {
  if (a1.size() == 0 || a1.size() != a2.size()) {
    throw ValidationError("matrix_shape", "generators must be square matrices of equal size");
  }
  ActionReport r;
  r.dimension = static_cast<int>(a1.size());
  r.check_radius = check_radius;
  r.commute = a1 * a2 == a2 * a1;
  r.det1 = a1.determinant();
  r.det2 = a2.determinant();
  r.unimodular = abs(r.det1) == 1 && abs(r.det2) == 1;
  r.min_unit_circle_distance = std::numeric_limits<double>::infinity();
  if (!r.commute || !r.unimodular) return r;

  const ToralAction action(a1, a2);
  r.spectrum_simple = action.spectrum().simple;
  std::vector<IntMatrix> p1, p2;
  for (int e = -check_radius; e <= check_radius; ++e) {
    p1.push_back(action.power({e, 0}));
    p2.push_back(action.power({0, e}));
  }
  r.unit_circle_free = true;
  for (int x = -check_radius; x <= check_radius; ++x) {
    for (int y = -check_radius; y <= check_radius; ++y) {
      if (x == 0 && y == 0) continue;
      const double dist = action.unit_circle_distance({x, y});
      r.min_unit_circle_distance = std::min(r.min_unit_circle_distance, dist);
      const IntMatrix m = p1[static_cast<std::size_t>(x + check_radius)] *
                          p2[static_cast<std::size_t>(y + check_radius)];
      auto orders = root_of_unity_orders(m.characteristic_polynomial());
      if ((dist < kUnitCircleTolerance || !orders.empty()) && r.unit_circle_free) {
        r.unit_circle_free = false;
        r.offending_exponent = Point{x, y};
        r.root_of_unity_orders = std::move(orders);
      }
    }
  }
  return r;
}

ToralAction verify_action(const IntMatrix& a1, const IntMatrix& a2, int check_radius) {
  const ActionReport r = inspect_action(a1, a2, check_radius);
  if (!r.commute) throw ValidationError("not_commuting", "A1 A2 != A2 A1");
  if (!r.unimodular) {
    throw ValidationError("not_unimodular",
                          "determinants are " + r.det1.str() + " and " + r.det2.str());
  }
  if (!r.unit_circle_free) {
    const Point l = *r.offending_exponent;
    throw ValidationError("unit_circle_eigenvalue", "A^l has an eigenvalue on the unit circle at l = (" +
                                                        std::to_string(l.x) + ", " +
                                                        std::to_string(l.y) + ")");
  }
  return ToralAction(a1, a2);
}

}  // namespace rwrs
