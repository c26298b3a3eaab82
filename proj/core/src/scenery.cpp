#include "rwrs/scenery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rwrs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double double_factorial_odd(int j) {  // (j - 1)!! for even j
  double r = 1.0;
  for (int k = j - 1; k > 1; k -= 2) r *= k;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool fits_int64(const BigInt& v) {
  return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

std::optional<Frequency> to_frequency(const IntVector& v) {
  Frequency out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!fits_int64(v[i])) return std::nullopt;
    out[i] = static_cast<std::int64_t>(v[i]);
  }
  return out;
}

// Index of key in a sorted key vector, or npos.
std::size_t find_key(std::span<const SiteKey> keys, SiteKey key) {
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(it - keys.begin());
}

}  // namespace

IidLaw IidLaw::rademacher(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw ValidationError("law_parameter", "variance must be positive");
  return IidLaw(IidKind::kRademacher, std::sqrt(variance), 0.0);
}

IidLaw IidLaw::uniform(double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ValidationError("law_parameter", "half width must be positive");
  return IidLaw(IidKind::kUniform, half_width, 0.0);
}

IidLaw IidLaw::gaussian(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw ValidationError("law_parameter", "variance must be positive");
  return IidLaw(IidKind::kGaussian, std::sqrt(variance), 0.0);
}

IidLaw IidLaw::two_point(double low, double high) {
  if (!(low < 0.0 && high > 0.0) || !std::isfinite(low) || !std::isfinite(high)) {
    throw ValidationError("law_parameter", "two-point law needs low < 0 < high");
  }
  return IidLaw(IidKind::kTwoPoint, low, high);
}

std::string IidLaw::name() const {
  switch (kind_) {
    case IidKind::kRademacher: return "rademacher";
    case IidKind::kUniform: return "uniform";
    case IidKind::kGaussian: return "gaussian";
    case IidKind::kTwoPoint: return "two_point";
  }
  return "unknown";
}

double IidLaw::moment(int j) const {
  if (j < 0 || j > 12) throw ValidationError("moment_order", "moment order must be in [0, 12]");
  if (j == 0) return 1.0;
  if (kind_ == IidKind::kTwoPoint) {
    const double p_low = b_ / (b_ - a_);
    return p_low * std::pow(a_, j) + (1.0 - p_low) * std::pow(b_, j);
  }
  if (j % 2 == 1) return 0.0;
  switch (kind_) {
    case IidKind::kRademacher: return std::pow(a_, j);
    case IidKind::kUniform: return std::pow(a_, j) / (j + 1);
    case IidKind::kGaussian: return double_factorial_odd(j) * std::pow(a_, j);
    default: return 0.0;
  }
}

double IidLaw::cumulant(int r) const {
  if (r < 1 || r > 12) throw ValidationError("moment_order", "cumulant order must be in [1, 12]");
  if (kind_ == IidKind::kGaussian) return r == 2 ? variance() : 0.0;
  std::vector<double> kappa(static_cast<std::size_t>(r) + 1, 0.0);
  for (int n = 1; n <= r; ++n) {
    double s = moment(n);
    for (int m = 1; m < n; ++m) s -= binomial(n - 1, m - 1) * kappa[m] * moment(n - m);
    kappa[n] = s;
  }
  return kappa[r];
}

double IidLaw::bound() const {
  switch (kind_) {
    case IidKind::kRademacher:
    case IidKind::kUniform: return a_;
    case IidKind::kGaussian: return kInf;
    case IidKind::kTwoPoint: return std::max(-a_, b_);
  }
  return kInf;
}

TruncationMoments IidLaw::truncation(double level) const {
  double e1 = 0.0;  // E[X 1{X > L}]
  double e2 = 0.0;  // E[X^2 1{X > L}]
  switch (kind_) {
    case IidKind::kRademacher:
      if (level < -a_) {
        e2 = a_ * a_;
      } else if (level < a_) {
        e1 = a_ / 2.0;
        e2 = a_ * a_ / 2.0;
      }
      break;
    case IidKind::kUniform: {
      const double l = std::clamp(level, -a_, a_);
      e1 = (a_ * a_ - l * l) / (4.0 * a_);
      e2 = (a_ * a_ * a_ - l * l * l) / (6.0 * a_);
      break;
    }
    case IidKind::kGaussian: {
      const double z = level / a_;
      const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      const double upper_tail = 0.5 * std::erfc(z / std::numbers::sqrt2);
      e1 = a_ * density;
      e2 = a_ * a_ * (z * density + upper_tail);
      break;
    }
    case IidKind::kTwoPoint: {
      const double p_low = b_ / (b_ - a_);
      if (a_ > level) {
        e1 += p_low * a_;
        e2 += p_low * a_ * a_;
      }
      if (b_ > level) {
        e1 += (1.0 - p_low) * b_;
        e2 += (1.0 - p_low) * b_ * b_;
      }
      break;
    }
  }
  TruncationMoments t;
  t.level = level;
  t.tail_mean = e1;
  t.bounded_mean = -e1;
  t.tail_variance = std::max(e2 - e1 * e1, 0.0);
  t.tail_second_moment = e2;
  t.bounded_variance = std::max(variance() - e2 - e1 * e1, 0.0);
  return t;
}

double IidLaw::sample(RandomStream& stream) const {
  switch (kind_) {
    case IidKind::kRademacher: return (stream.next_u32() & 1u) ? a_ : -a_;
    case IidKind::kUniform: return (2.0 * stream.uniform01() - 1.0) * a_;
    case IidKind::kGaussian: return a_ * stream.normal();
    case IidKind::kTwoPoint: return stream.uniform01() < b_ / (b_ - a_) ? a_ : b_;
  }
  return 0.0;
}

double MovingAverage::coefficient_sum() const {
  double s = 0.0;
  for (const auto& [q, a] : coefficients) s += a;
  return s;
}

MovingAverage MovingAverage::positive_part() const {
  MovingAverage m{{}, base};
  for (const auto& [q, a] : coefficients) {
    if (a > 0.0) m.coefficients[q] = a;
  }
  return m;
}

MovingAverage MovingAverage::negative_part() const {
  MovingAverage m{{}, base};
  for (const auto& [q, a] : coefficients) {
    if (a < 0.0) m.coefficients[q] = -a;
  }
  return m;
}

int MovingAverage::radius() const {
  std::int64_t r = 0;
  for (const auto& [q, a] : coefficients) r = std::max(r, sup_norm(q));
  return static_cast<int>(r);
}

void validate_model(const SceneryModel& model) {
  if (const auto* ma = std::get_if<MovingAverage>(&model)) {
    if (ma->coefficients.empty()) throw ValidationError("empty_filter", "moving average has no coefficients");
    for (const auto& [q, a] : ma->coefficients) {
      if (!std::isfinite(a)) throw ValidationError("empty_filter", "non-finite filter coefficient");
    }
  } else if (const auto* t = std::get_if<ToralModel>(&model)) {
    if (t->modulus >= (std::uint64_t{1} << 62) || !is_prime_u64(t->modulus)) {
      throw ValidationError("modulus_not_prime", "toral modulus must be a prime below 2^62");
    }
    if (t->observable.dimension() != t->action.dimension()) {
      throw ValidationError("frequency_dimension", "observable and action dimensions differ");
    }
  }
}

std::string model_kind(const SceneryModel& model) {
  switch (model.index()) {
    case 0: return "iid";
    case 1: return "moving_average";
    default: return "toral";
  }
}

double SceneryField::at(Point p) const {
  const std::size_t i = find_key(keys, pack_site(p));
  if (i == std::numeric_limits<std::size_t>::max()) throw std::out_of_range("site not in scenery support");
  return values[i];
}

std::vector<SiteKey> union_support(std::span<const OccupationField* const> fields) {
  std::vector<SiteKey> out;
  for (const auto* f : fields) out.insert(out.end(), f->keys().begin(), f->keys().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SceneryField sample_scenery(std::span<const SiteKey> support, const SceneryModel& model,
                            RandomStream& stream) {
  SceneryField field;
  field.keys.assign(support.begin(), support.end());
  field.values.resize(support.size());

  if (const auto* law = std::get_if<IidLaw>(&model)) {
    for (auto& v : field.values) v = law->sample(stream);
    return field;
  }

  if (const auto* ma = std::get_if<MovingAverage>(&model)) {
    std::vector<SiteKey> extended;
    extended.reserve(support.size() * ma->coefficients.size());
    for (auto key : support) {
      const Point l = unpack_site(key);
      for (const auto& [q, a] : ma->coefficients) extended.push_back(pack_site(l - q));
    }
    std::sort(extended.begin(), extended.end());
    extended.erase(std::unique(extended.begin(), extended.end()), extended.end());
    std::vector<double> base(extended.size());
    for (auto& v : base) v = ma->base.sample(stream);
    for (std::size_t i = 0; i < support.size(); ++i) {
      const Point l = unpack_site(support[i]);
      double s = 0.0;
      for (const auto& [q, a] : ma->coefficients) s += a * base[find_key(extended, pack_site(l - q))];
      field.values[i] = s;
    }
    return field;
  }

  const auto& toral = std::get<ToralModel>(model);
  if (support.empty()) return field;
  const std::size_t rho = static_cast<std::size_t>(toral.action.dimension());
  const std::uint64_t q = toral.modulus;
  std::vector<std::uint64_t> point(rho);
  for (auto& c : point) c = stream.uniform_below(q);

  std::int64_t min_x = std::numeric_limits<std::int64_t>::max(), max_x = std::numeric_limits<std::int64_t>::min();
  std::int64_t min_y = min_x, max_y = max_x;
  for (auto key : support) {
    const Point l = unpack_site(key);
    min_x = std::min(min_x, l.x);
    max_x = std::max(max_x, l.x);
    min_y = std::min(min_y, l.y);
    max_y = std::max(max_y, l.y);
  }
  const auto powers_x = toral.action.generator_powers_mod(1, min_x, max_x, q);
  const auto powers_y = toral.action.generator_powers_mod(2, min_y, max_y, q);
  // A^l p = A1^x (A2^y p); the inner factor depends on y only.
  std::vector<std::uint64_t> inner(rho * powers_y.size());
  for (std::size_t j = 0; j < powers_y.size(); ++j) powers_y[j].apply(point.data(), &inner[j * rho]);

  const ToralEvaluator f(toral.observable, q);
  std::vector<std::uint64_t> y(rho);
  for (std::size_t i = 0; i < support.size(); ++i) {
    const Point l = unpack_site(support[i]);
    powers_x[static_cast<std::size_t>(l.x - min_x)].apply(&inner[static_cast<std::size_t>(l.y - min_y) * rho], y.data());
    field.values[i] = f(y.data()).real();
  }
  return field;
}

double weighted_sum(const OccupationField& w, const SceneryField& x) {
  const auto keys = w.keys();
  const auto counts = w.counts();
  double s = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    while (j < x.keys.size() && x.keys[j] < keys[i]) ++j;
    if (j == x.keys.size() || x.keys[j] != keys[i]) throw std::out_of_range("site not in scenery support");
    s += static_cast<double>(counts[i]) * x.values[j];
  }
  return s;
}

ToralEvaluator::ToralEvaluator(const TrigPolynomial& f, std::uint64_t modulus) : q_(modulus) {
  for (const auto& [k, c] : f.terms()) {
    std::vector<std::uint64_t> r;
    for (auto v : k) r.push_back(reduce_mod(v, q_));
    residues_.push_back(std::move(r));
    coefficients_.push_back(c);
  }
}

std::complex<double> ToralEvaluator::operator()(const std::uint64_t* y) const {
  std::complex<double> s = 0.0;
  const auto half = q_ / 2;
  for (std::size_t t = 0; t < residues_.size(); ++t) {
    unsigned __int128 acc = 0;
    for (std::size_t i = 0; i < residues_[t].size(); ++i) {
      acc += static_cast<unsigned __int128>(residues_[t][i]) * y[i] % q_;
    }
    const auto r = static_cast<std::uint64_t>(acc % q_);
    // Centered residue, so that k and -k give exactly opposite angles.
    const double centered = r > half ? -static_cast<double>(q_ - r) : static_cast<double>(r);
    const double angle = 2.0 * std::numbers::pi * (centered / static_cast<double>(q_));
    s += coefficients_[t] * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return s;
}

std::complex<double> toral_value(const ToralModel& model, std::span<const std::uint64_t> point, Point l) {
  const std::size_t rho = static_cast<std::size_t>(model.action.dimension());
  if (point.size() != rho) throw ValidationError("frequency_dimension", "point size mismatch");
  std::vector<std::uint64_t> y(rho);
  model.action.power_mod(l, model.modulus).apply(point.data(), y.data());
  return ToralEvaluator(model.observable, model.modulus)(y.data());
}

namespace {

double toral_correlation(const TrigPolynomial& f, const IntMatrix& transposed_power) {
  std::complex<double> s = 0.0;
  for (const auto& [m, c] : f.terms()) {
    const auto image = to_frequency(transposed_power * IntVector(m.begin(), m.end()));
    if (!image) continue;
    const auto ck = f.coefficient(*image);
    if (ck != std::complex<double>(0.0, 0.0)) s += c * std::conj(ck);
  }
  return s.real();
}

}  // namespace

double exact_correlation(const SceneryModel& model, Point l) {
  if (const auto* law = std::get_if<IidLaw>(&model)) {
    return l == Point{0, 0} ? law->variance() : 0.0;
  }
  if (const auto* ma = std::get_if<MovingAverage>(&model)) {
    double s = 0.0;
    for (const auto& [q, a] : ma->coefficients) {
      const auto it = ma->coefficients.find(q - l);
      if (it != ma->coefficients.end()) s += a * it->second;
    }
    return s * ma->base.variance();
  }
  const auto& toral = std::get<ToralModel>(model);
  return toral_correlation(toral.observable, toral.action.transposed_power(l));
}

std::vector<double> toral_correlation_window(const ToralModel& model, int radius) {
  const std::size_t side = static_cast<std::size_t>(2 * radius + 1);
  std::vector<IntMatrix> px, py;
  for (int e = -radius; e <= radius; ++e) {
    px.push_back(model.action.transposed_power({e, 0}));
    py.push_back(model.action.transposed_power({0, e}));
  }
  std::vector<double> out(side * side);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      out[i * side + j] = toral_correlation(model.observable, px[i] * py[j]);
    }
  }
  return out;
}

TrigPolynomial coboundary(const TrigPolynomial& g, int direction, const ToralAction& action) {
  if (direction != 1 && direction != 2) throw ValidationError("direction", "direction must be 1 or 2");
  if (g.dimension() != action.dimension()) throw ValidationError("frequency_dimension", "dimension mismatch");
  const Point l = direction == 1 ? Point{1, 0} : Point{0, 1};
  TrigPolynomial f(g.dimension());
  for (const auto& [k, c] : g.terms()) {
    if (k < negate(k)) continue;  // one representative per Hermitian pair
    const auto image = to_frequency(action.transported_frequency(k, l));
    if (!image) throw ValidationError("frequency_overflow", "transported frequency exceeds 64 bits");
    f.add_pair(k, c);
    f.add_pair(*image, -c);
  }
  return f;
}

}  // namespace rwrs
