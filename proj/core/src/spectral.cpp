#include "rwrs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace rwrs {

namespace {

std::size_t window_index(int radius, Point l) {
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  return static_cast<std::size_t>(l.x + radius) * side + static_cast<std::size_t>(l.y + radius);
}

void symmetrize(CorrelationTable& t) {
  const int r = t.radius;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) {
      const auto a = window_index(r, {x, y});
      const auto b = window_index(r, {-x, -y});
      if (a < b) {
        const double mean = 0.5 * (t.values[a] + t.values[b]);
        t.values[a] = t.values[b] = mean;
      }
    }
  }
}

double toral_tail_bound(const ToralModel& model, int radius) {
  const auto& terms = model.observable.terms();
  constexpr std::size_t kMaxPairSupport = 2000;
  if (terms.size() > kMaxPairSupport) {
    const double l1 = model.observable.l1_norm();
    return l1 * l1;
  }
  double tail = 0.0;
  for (const auto& [m, cm] : terms) {
    for (const auto& [k, ck] : terms) {
      const PairLocation loc = model.action.locate(m, k);
      const bool inside = loc.status == OrbitMatch::kFound && sup_norm(loc.exponent) <= radius;
      if (loc.status == OrbitMatch::kNone || inside) continue;
      tail += std::abs(cm) * std::abs(ck);
    }
  }
  return tail;
}

}  // namespace

double CorrelationTable::at(Point l) const {
  if (sup_norm(l) > radius) return 0.0;
  return values[window_index(radius, l)];
}

double CorrelationTable::window_sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

std::vector<Point> CorrelationTable::support() const {
  std::vector<Point> out;
  for (int x = -radius; x <= radius; ++x) {
    for (int y = -radius; y <= radius; ++y) {
      if (values[window_index(radius, {x, y})] != 0.0) out.push_back({x, y});
    }
  }
  return out;
}

CorrelationTable correlation_table(const SceneryModel& model, int radius) {
  if (radius < 0) throw ValidationError("window_radius", "correlation radius must be >= 0");
  validate_model(model);
  CorrelationTable t;
  t.radius = radius;
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  t.values.assign(side * side, 0.0);

  if (const auto* law = std::get_if<IidLaw>(&model)) {
    t.values[window_index(radius, {0, 0})] = law->variance();
    return t;
  }
  if (const auto* ma = std::get_if<MovingAverage>(&model)) {
    std::map<Point, double> corr;
    const double var = ma->base.variance();
    for (const auto& [q, a] : ma->coefficients) {
      for (const auto& [q2, a2] : ma->coefficients) corr[q - q2] += a * a2 * var;
    }
    for (const auto& [l, v] : corr) {
      if (sup_norm(l) <= radius) {
        t.values[window_index(radius, l)] = v;
      } else {
        t.tail_bound += std::abs(v);
      }
    }
    symmetrize(t);
    return t;
  }
  const auto& toral = std::get<ToralModel>(model);
  t.values = toral_correlation_window(toral, radius);
  symmetrize(t);
  t.tail_bound = toral_tail_bound(toral, radius);
  return t;
}

SpectralValue spectral_density_eval(const CorrelationTable& table, std::array<double, 2> t) {
  double s = 0.0;
  const int r = table.radius;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) {
      const double v = table.values[window_index(r, {x, y})];
      if (v != 0.0) s += v * std::cos(2.0 * std::numbers::pi * (x * t[0] + y * t[1]));
    }
  }
  return {s, table.tail_bound};
}

SpectralValue spectral_density_eval(const SceneryModel& model, std::array<double, 2> t, int radius) {
  if (const auto* law = std::get_if<IidLaw>(&model)) return {law->variance(), 0.0};
  if (const auto* ma = std::get_if<MovingAverage>(&model)) {
    std::complex<double> s = 0.0;
    for (const auto& [q, a] : ma->coefficients) {
      const double angle = 2.0 * std::numbers::pi * (static_cast<double>(q.x) * t[0] + static_cast<double>(q.y) * t[1]);
      s += a * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return {std::norm(s) * ma->base.variance(), 0.0};
  }
  return spectral_density_eval(correlation_table(model, radius), t);
}

SpectralValue asymptotic_variance(const SceneryModel& model, double c0, int radius) {
  const SpectralValue phi0 = spectral_density_eval(model, {0.0, 0.0}, radius);
  return {phi0.value * c0, phi0.tail_bound * c0};
}

double covariance_exact(const OccupationField& w_i, const OccupationField& w_j,
                        const CorrelationTable& table) {
  double s = 0.0;
  for (const Point p : table.support()) {
    s += static_cast<double>(intersections(w_i, w_j, p)) * table.at(p);
  }
  return s;
}

VarianceResult variance_exact(std::span<const WeightedField> fields, const CorrelationTable& table) {
  VarianceResult r;
  r.exact = table.certified();
  const auto support = table.support();
  for (std::size_t j = 0; j < fields.size(); ++j) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const auto& wj = *fields[j].field;
      const auto& wk = *fields[k].field;
      const double coef = fields[j].weight * fields[k].weight;
      if (coef == 0.0) continue;
      double cov = 0.0;
      for (const Point p : support) cov += static_cast<double>(intersections(wj, wk, p)) * table.at(p);
      r.value += coef * cov;
      // V(I, J, p) <= max_count(I) |J| for every p.
      const double v_max = std::min(static_cast<double>(wj.max_count()) * static_cast<double>(wk.total()),
                                    static_cast<double>(wk.max_count()) * static_cast<double>(wj.total()));
      r.error_bound += std::abs(coef) * v_max * table.tail_bound;
    }
  }
  return r;
}

PowerDecayRule::PowerDecayRule(int dimension, double beta, double amplitude)
    : dim_(dimension), beta_(beta), amplitude_(amplitude) {
  if (dimension < 1) throw ValidationError("frequency_dimension", "dimension must be >= 1");
}

std::complex<double> PowerDecayRule::coefficient(const Frequency& k) const {
  double n2 = 0.0;
  for (auto v : k) n2 += static_cast<double>(v) * static_cast<double>(v);
  if (n2 == 0.0) return 0.0;
  return amplitude_ * std::pow(n2, -beta_ / 2.0);
}

double PowerDecayRule::tail_bound(int radius) const {
  if (beta_ <= dim_) return std::numeric_limits<double>::infinity();
  // Shell |k|_inf = s has (2s+1)^rho - (2s-1)^rho points, each with
  // |c(k)| <= A s^{-beta}. Explicit shells up to `cutoff`, integral beyond.
  const double rho = dim_;
  const auto start = static_cast<std::int64_t>(std::max(radius, 0)) + 1;
  const std::int64_t cutoff = start + 50000;
  double sum = 0.0;
  for (std::int64_t s = cutoff; s >= start; --s) {  // small terms first
    const double ds = static_cast<double>(s);
    const double shell = std::pow(2 * ds + 1, rho) - std::pow(2 * ds - 1, rho);
    sum += shell * std::pow(ds, -beta_);
  }
  const double cs = static_cast<double>(cutoff);
  const double remainder = 2 * rho * std::pow(2 + 1 / cs, rho - 1) * std::pow(cs, rho - beta_) / (beta_ - rho);
  return std::abs(amplitude_) * (sum + remainder) * (1.0 + 1e-9);
}

FinitePolynomialRule::FinitePolynomialRule(TrigPolynomial f) : f_(std::move(f)) {}

std::complex<double> FinitePolynomialRule::coefficient(const Frequency& k) const {
  return f_.coefficient(k);
}

double FinitePolynomialRule::tail_bound(int radius) const {
  double s = 0.0;
  for (const auto& [k, c] : f_.terms()) {
    std::int64_t norm = 0;
    for (auto v : k) norm = std::max(norm, v < 0 ? -v : v);
    if (norm > radius) s += std::abs(c);
  }
  return s;
}

std::optional<int> FinitePolynomialRule::support_radius() const {
  std::int64_t r = 0;
  for (const auto& [k, c] : f_.terms()) {
    for (auto v : k) r = std::max(r, v < 0 ? -v : v);
  }
  return static_cast<int>(r);
}

Ac0Truncation ac0_truncate(const CoefficientRule& rule, double epsilon, std::size_t max_terms) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon", "epsilon must be positive");
  const int rho = rule.dimension();
  Ac0Truncation out{TrigPolynomial(rho), 0, 0.0};

  if (const auto support = rule.support_radius()) {
    out.radius = *support;
  } else {
    if (!std::isfinite(rule.tail_bound(0))) {
      throw ValidationError("not_summable", "coefficient rule has a non-summable l1 tail");
    }
    while (true) {
      const double tail = rule.tail_bound(out.radius);
      if (tail * tail <= epsilon) break;
      ++out.radius;
    }
  }
  const double box = std::pow(2.0 * out.radius + 1.0, rho);
  if (box > static_cast<double>(max_terms)) {
    throw ValidationError("truncation_too_large", "truncation needs radius " + std::to_string(out.radius));
  }
  out.tail_bound = rule.tail_bound(out.radius);

  Frequency k(static_cast<std::size_t>(rho), -out.radius);
  while (true) {
    const Frequency minus = negate(k);
    if (minus < k) {  // one representative per Hermitian pair; skips k = 0
      const auto c = rule.coefficient(k);
      if (rule.coefficient(minus) != std::conj(c)) {
        throw ValidationError("not_hermitian", "coefficient rule must satisfy c(-k) = conj(c(k))");
      }
      if (c != std::complex<double>(0.0, 0.0)) out.polynomial.add_pair(k, c);
    }
    std::size_t i = 0;
    while (i < k.size() && k[i] == out.radius) k[i++] = -out.radius;
    if (i == k.size()) break;
    ++k[i];
  }
  return out;
}

}  // namespace rwrs
