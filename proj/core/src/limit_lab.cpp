#include "rwrs/limit_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "rwrs/stats.hpp"

namespace rwrs {

namespace {

std::string indexed(const std::string& name, const std::string& key, std::size_t i) {
  return name + "[" + key + "=" + std::to_string(i) + "]";
}

std::string indexed_point(const std::string& name, Point l) {
  return name + "[l=(" + std::to_string(l.x) + "," + std::to_string(l.y) + ")]";
}

// Position in `keys` of every key of w.
std::vector<std::uint32_t> positions_in(std::span<const SiteKey> keys, const OccupationField& w) {
  std::vector<std::uint32_t> out;
  out.reserve(w.size());
  std::size_t j = 0;
  for (SiteKey k : w.keys()) {
    while (keys[j] < k) ++j;
    out.push_back(static_cast<std::uint32_t>(j));
  }
  return out;
}

// Position in `keys` of Z_u for each u of the interval.
std::vector<std::uint32_t> time_positions(std::span<const SiteKey> keys, const WalkPath& path,
                                          Interval iv) {
  std::vector<std::uint32_t> out(iv.length);
  for (std::size_t u = 0; u < iv.length; ++u) {
    const SiteKey k = pack_site(path.positions[iv.begin + u]);
    out[u] = static_cast<std::uint32_t>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin());
  }
  return out;
}

double dot(std::span<const std::uint64_t> counts, std::span<const std::uint32_t> pos,
           const std::vector<double>& values) {
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) s += static_cast<double>(counts[i]) * values[pos[i]];
  return s;
}

double n_log_n(std::size_t n) {
  const auto x = static_cast<double>(n);
  return n > 1 ? x * std::log(x) : kNotApplicable;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg, bool distributional) {
  if (cfg.n < 2) throw ValidationError("n", "walk length must be at least 2");
  const auto& g = cfg.time_grid;
  if (g.size() < 2 || g.front() != 0.0 || g.back() != 1.0 ||
      std::adjacent_find(g.begin(), g.end(), [](double a, double b) { return !(a < b); }) != g.end()) {
    throw ValidationError("grid", "time grid must increase strictly from 0 to 1");
  }
  if (cfg.replicates < (distributional ? 100u : 1u)) {
    throw ValidationError("replicates", distributional
                                            ? "distributional tests need at least 100 replicates"
                                            : "need at least one replicate");
  }
  if (cfg.omega_replicates < 1) throw ValidationError("replicates", "need at least one walk");
  if (!std::isfinite(cfg.c0) || cfg.c0 <= 0.0) {
    throw ValidationError("c0_missing", "a positive C0 must be supplied");
  }
  if (cfg.workers < 1) throw ValidationError("workers", "need at least one worker");
  if (cfg.correlation_radius < 0) throw ValidationError("radius", "correlation radius must be >= 0");
  validate_model(cfg.model);
}

RandomStream walk_stream(std::uint64_t master_seed, std::size_t omega) {
  return RandomStream(master_seed, derive_stream(stream_tag::kWalk, omega));
}

RandomStream scenery_stream(std::uint64_t master_seed, std::size_t omega, std::size_t replicate) {
  return RandomStream(master_seed,
                      derive_stream(derive_stream(stream_tag::kScenery, omega), replicate));
}

RandomStream auxiliary_stream(std::uint64_t master_seed, std::uint64_t tag) {
  return RandomStream(master_seed, derive_stream(stream_tag::kAuxiliary, tag));
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1u), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::vector<WalkPath> sample_walks(const StepDistribution& walk, std::size_t n, std::size_t count,
                                   std::uint64_t master_seed, unsigned workers) {
  std::vector<WalkPath> paths(count);
  parallel_for(count, workers, [&](std::size_t i) {
    auto stream = walk_stream(master_seed, i);
    paths[i] = sample_path(walk, n, stream);
  });
  return paths;
}

std::vector<Interval> grid_intervals(std::size_t n, std::span<const double> grid) {
  std::vector<Interval> out;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const auto a = static_cast<std::size_t>(std::floor(static_cast<double>(n) * grid[j - 1]));
    const auto b = static_cast<std::size_t>(std::floor(static_cast<double>(n) * grid[j]));
    out.push_back({a, b - a});
  }
  return out;
}

StatReport fclt_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg, true);
  StatReport report;
  report.experiment = "fclt";
  report.provenance.master_seed = cfg.master_seed;

  const auto table = correlation_table(cfg.model, cfg.correlation_radius);
  const double phi0 = table.window_sum();
  report.estimate("phi0", phi0);
  report.estimate("phi0_tail_bound", table.tail_bound);
  if (std::abs(phi0) <= std::max(1e-9 * std::abs(table.at({0, 0})), table.tail_bound)) {
    report.notes.push_back("phi_f(0) vanishes within the tail bound; the limit is degenerate and "
                           "the distributional tests were skipped");
    report.flag("variance_nondegenerate", false, 0);
    return report;
  }

  const auto intervals = grid_intervals(cfg.n, cfg.time_grid);
  const std::size_t s = intervals.size();
  const std::size_t reps = cfg.replicates;
  const double scale = cfg.c0 * phi0 * n_log_n(cfg.n);

  std::vector<std::vector<double>> projections(3, std::vector<double>(s));
  for (std::size_t j = 0; j < s; ++j) {
    projections[0][j] = 1.0;
    projections[1][j] = j % 2 == 0 ? 1.0 : -1.0;
    projections[2][j] = static_cast<double>(j + 1);
  }
  const double level = cfg.alpha / static_cast<double>(projections.size());

  struct OmegaResult {
    std::vector<double> ratio_mc, ratio_exact;
    double total_mc = 0.0, total_exact = 0.0;
    std::vector<KsResult> ks;
    double corr_mc = 0.0, corr_exact = 0.0;
    bool passed = false;
  };
  std::vector<OmegaResult> results(cfg.omega_replicates);

  parallel_for(cfg.omega_replicates, cfg.workers, [&](std::size_t omega) {
    auto ws = walk_stream(cfg.master_seed, omega);
    const auto path = sample_path(cfg.walk, cfg.n, ws);
    std::vector<OccupationField> fields;
    for (const auto& iv : intervals) fields.push_back(occupation(path, iv));
    std::vector<const OccupationField*> ptrs;
    for (const auto& f : fields) ptrs.push_back(&f);
    const auto keys = union_support(ptrs);
    std::vector<std::vector<std::uint32_t>> pos;
    for (const auto& f : fields) pos.push_back(positions_in(keys, f));

    std::vector<double> cov(s * s);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = i; j < s; ++j) {
        cov[i * s + j] = cov[j * s + i] = covariance_exact(fields[i], fields[j], table);
      }
    }

    std::vector<double> inc(reps * s);
    for (std::size_t r = 0; r < reps; ++r) {
      auto ss = scenery_stream(cfg.master_seed, omega, r);
      const auto x = sample_scenery(keys, cfg.model, ss);
      for (std::size_t j = 0; j < s; ++j) inc[r * s + j] = dot(fields[j].counts(), pos[j], x.values);
    }

    OmegaResult& out = results[omega];
    std::vector<double> column(reps);
    std::vector<double> sd(s);
    for (std::size_t j = 0; j < s; ++j) {
      for (std::size_t r = 0; r < reps; ++r) column[r] = inc[r * s + j];
      const double dt = cfg.time_grid[j + 1] - cfg.time_grid[j];
      out.ratio_mc.push_back(variance_estimate(column).mean / (scale * dt));
      out.ratio_exact.push_back(cov[j * s + j] / (scale * dt));
      sd[j] = std::sqrt(variance_estimate(column).mean);
    }
    for (std::size_t r = 0; r < reps; ++r) {
      column[r] = 0.0;
      for (std::size_t j = 0; j < s; ++j) column[r] += inc[r * s + j];
    }
    out.total_mc = variance_estimate(column).mean / scale;
    out.total_exact = std::accumulate(cov.begin(), cov.end(), 0.0) / scale;

    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = i + 1; j < s; ++j) {
        if (cov[i * s + i] > 0 && cov[j * s + j] > 0) {
          out.corr_exact = std::max(
              out.corr_exact, std::abs(cov[i * s + j]) / std::sqrt(cov[i * s + i] * cov[j * s + j]));
        }
        if (sd[i] > 0 && sd[j] > 0) {
          double c = 0.0, mi = 0.0, mj = 0.0;
          for (std::size_t r = 0; r < reps; ++r) {
            mi += inc[r * s + i];
            mj += inc[r * s + j];
          }
          mi /= static_cast<double>(reps);
          mj /= static_cast<double>(reps);
          for (std::size_t r = 0; r < reps; ++r) c += (inc[r * s + i] - mi) * (inc[r * s + j] - mj);
          c /= static_cast<double>(reps - 1);
          out.corr_mc = std::max(out.corr_mc, std::abs(c) / (sd[i] * sd[j]));
        }
      }
    }

    out.passed = true;
    for (const auto& a : projections) {
      double var = 0.0;
      if (cfg.normalization == Normalization::kExact) {
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = 0; j < s; ++j) var += a[i] * a[j] * cov[i * s + j];
      } else {
        for (std::size_t j = 0; j < s; ++j) {
          var += a[j] * a[j] * scale * (cfg.time_grid[j + 1] - cfg.time_grid[j]);
        }
      }
      if (!(var > 0.0)) {
        out.ks.push_back({0.0, 1.0});
        continue;
      }
      const double norm = std::sqrt(var);
      std::vector<double> z(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        double v = 0.0;
        for (std::size_t j = 0; j < s; ++j) v += a[j] * inc[r * s + j];
        z[r] = v / norm;
      }
      out.ks.push_back(ks_test_normal(std::move(z)));
      if (out.ks.back().p_value < level) out.passed = false;
    }
  });

  const auto omegas = cfg.omega_replicates;
  auto collect = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : results) v.push_back(get(r));
    return mean_estimate(v);
  };
  for (std::size_t j = 0; j < s; ++j) {
    const auto mc = collect([j](const OmegaResult& r) { return r.ratio_mc[j]; });
    const auto ex = collect([j](const OmegaResult& r) { return r.ratio_exact[j]; });
    report.estimate(indexed("variance_ratio_mc", "j", j), mc.mean, mc.std_error, omegas);
    report.estimate(indexed("variance_ratio_exact", "j", j), ex.mean, ex.std_error, omegas);
  }
  const auto total_mc = collect([](const OmegaResult& r) { return r.total_mc; });
  const auto total_exact = collect([](const OmegaResult& r) { return r.total_exact; });
  report.estimate("variance_ratio_total_mc", total_mc.mean, total_mc.std_error, omegas);
  report.estimate("variance_ratio_total_exact", total_exact.mean, total_exact.std_error, omegas);
  const auto corr_mc = collect([](const OmegaResult& r) { return r.corr_mc; });
  const auto corr_exact = collect([](const OmegaResult& r) { return r.corr_exact; });
  report.estimate("increment_corr_max_abs_mc", corr_mc.mean, corr_mc.std_error, omegas);
  report.estimate("increment_corr_max_abs_exact", corr_exact.mean, corr_exact.std_error, omegas);

  std::size_t passing = 0;
  for (std::size_t omega = 0; omega < omegas; ++omega) {
    const auto& r = results[omega];
    double pmin = 1.0;
    for (const auto& k : r.ks) pmin = std::min(pmin, k.p_value);
    report.estimate(indexed("ks_p_min", "omega", omega), pmin, kNotApplicable, reps);
    if (r.passed) ++passing;
  }
  for (std::size_t k = 0; k < projections.size(); ++k) {
    const auto d = collect([k](const OmegaResult& r) { return r.ks[k].statistic; });
    report.estimate(indexed("ks_statistic_mean", "projection", k), d.mean, d.std_error, omegas);
  }

  report.check("ks_pass_fraction", static_cast<double>(passing) / static_cast<double>(omegas),
               cfg.ks_pass_fraction, kNotApplicable, omegas);
  report.check("variance_ratio_total", total_mc.mean, cfg.variance_band[0], cfg.variance_band[1],
               omegas);
  report.notes.push_back(cfg.normalization == Normalization::kExact
                             ? "projections standardized by their exact conditional variance"
                             : "projections standardized by C0 phi_f(0) n ln n");
  return report;
}

CrossTerm cross_term_diagnostic(const WalkPath& path, double a, Point p, double c0) {
  if (!(a > 0.0 && a < 1.0)) throw ValidationError("split", "split point must lie in (0, 1)");
  const std::size_t n = path.steps();
  const auto m = static_cast<std::size_t>(std::floor(static_cast<double>(n) * a));
  const auto whole = occupation(path, {0, n});
  const auto left = occupation(path, {0, m});
  const auto right = occupation(path, {m, n - m});
  CrossTerm out;
  out.cross_count = intersections(left, right, p) + intersections(right, left, p);
  const BigInt lhs = BigInt(intersections(whole, whole, p)) - intersections(left, left, p) -
                     intersections(right, right, p);
  out.additive = lhs == BigInt(out.cross_count);
  out.value = static_cast<double>(out.cross_count) / (c0 * n_log_n(n));
  return out;
}

namespace {

StatReport newman_wright_single(const ExperimentConfig& cfg, double lambda) {
  StatReport report;
  const auto table = correlation_table(cfg.model, cfg.correlation_radius);
  constexpr double kZ = 2.5758293035489;  // two-sided 99%
  const double shift = lambda - std::numbers::sqrt2;

  struct Counts {
    std::uint64_t lhs = 0, rhs = 0;
    double sigma = 0.0;
  };
  std::vector<Counts> counts(cfg.omega_replicates);
  parallel_for(cfg.omega_replicates, cfg.workers, [&](std::size_t omega) {
    auto ws = walk_stream(cfg.master_seed, omega);
    const auto path = sample_path(cfg.walk, cfg.n, ws);
    const Interval whole{0, cfg.n};
    const auto w = occupation(path, whole);
    const auto keys = w.keys();
    const auto idx = time_positions(keys, path, whole);
    const double sigma = std::sqrt(std::max(covariance_exact(w, w, table), 0.0));
    Counts& c = counts[omega];
    c.sigma = sigma;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      auto ss = scenery_stream(cfg.master_seed, omega, r);
      const auto x = sample_scenery(keys, cfg.model, ss);
      double partial = 0.0, peak = 0.0;
      for (auto i : idx) {
        partial += x.values[i];
        peak = std::max(peak, std::abs(partial));
      }
      if (peak >= lambda * sigma) ++c.lhs;
      if (std::abs(partial) >= shift * sigma) ++c.rhs;
    }
  });

  for (std::size_t omega = 0; omega < counts.size(); ++omega) {
    const auto& c = counts[omega];
    const double reps = static_cast<double>(cfg.replicates);
    const double pl = static_cast<double>(c.lhs) / reps;
    const double pr = static_cast<double>(c.rhs) / reps;
    const double hl = wilson_interval(c.lhs, cfg.replicates, kZ).half_width();
    const double hr = wilson_interval(c.rhs, cfg.replicates, kZ).half_width();
    report.estimate(indexed("sigma", "omega", omega), c.sigma);
    report.estimate(indexed("p_max", "omega", omega), pl, hl, cfg.replicates);
    report.estimate(indexed("p_end", "omega", omega), pr, hr, cfg.replicates);
    report.check(indexed("newman_wright", "omega", omega), pl, kNotApplicable,
                 2.0 * pr + 2.0 * std::sqrt(hl * hl + 4.0 * hr * hr), cfg.replicates);
  }
  return report;
}

}  // namespace

StatReport newman_wright_check(const ExperimentConfig& cfg, double lambda) {
  validate_config(cfg, false);
  if (!(lambda > std::numbers::sqrt2)) {
    throw ValidationError("lambda", "lambda must exceed sqrt(2)");
  }
  StatReport report;
  report.experiment = "newman_wright";
  report.provenance.master_seed = cfg.master_seed;
  report.estimate("lambda", lambda);

  if (const auto* ma = std::get_if<MovingAverage>(&cfg.model)) {
    bool mixed = false;
    for (const auto& [q, a] : ma->coefficients) mixed |= a < 0.0;
    if (mixed) {
      report.notes.push_back("mixed-sign filter: checked on the positive and negative parts");
      for (const auto& [prefix, part] :
           {std::pair{std::string("a_plus/"), ma->positive_part()},
            std::pair{std::string("a_minus/"), ma->negative_part()}}) {
        if (part.coefficients.empty()) continue;
        auto sub = cfg;
        sub.model = part;
        report.merge(newman_wright_single(sub, lambda), prefix);
      }
      return report;
    }
  }
  report.merge(newman_wright_single(cfg, lambda), "");
  return report;
}

double moricz_constant() {
  return std::pow(1.0 - std::pow(2.0, -0.25), -4.0);
}

double iid_fourth_moment(const IidLaw& law, const OccupationField& w) {
  const double v = power_sum(w, 2).convert_to<double>();
  const double u4 = power_sum(w, 4).convert_to<double>();
  const double s2 = law.moment(2);
  return 3.0 * s2 * s2 * (v * v - u4) + law.moment(4) * u4;
}

StatReport moricz_check(const ExperimentConfig& cfg, const MoriczOptions& options) {
  validate_config(cfg, false);
  const auto* law = std::get_if<IidLaw>(&cfg.model);
  if (law == nullptr) throw ValidationError("model", "the fourth-moment check needs an iid scenery");
  const Interval iv = options.interval.length == 0 ? Interval{0, cfg.n} : options.interval;
  if (iv.end() > cfg.n) throw ValidationError("interval_out_of_range", "interval exceeds the walk");

  StatReport report;
  report.experiment = "moricz";
  report.provenance.master_seed = cfg.master_seed;
  const double cmax = moricz_constant();
  const double g_factor = std::sqrt(3.0 * law->moment(2) * law->moment(2) + law->moment(4));
  report.estimate("C_max", cmax);

  struct Result {
    double exact = 0.0, g0 = 0.0;
    MeanEstimate s4, m4;
  };
  std::vector<Result> results(cfg.omega_replicates);
  std::vector<WalkPath> paths(cfg.omega_replicates);
  parallel_for(cfg.omega_replicates, cfg.workers, [&](std::size_t omega) {
    auto ws = walk_stream(cfg.master_seed, omega);
    paths[omega] = sample_path(cfg.walk, cfg.n, ws);
    const auto& path = paths[omega];
    const auto w = occupation(path, iv);
    const auto keys = w.keys();
    const auto idx = time_positions(keys, path, iv);
    Result& out = results[omega];
    out.exact = iid_fourth_moment(*law, w);
    out.g0 = g_factor * power_sum(w, 2).convert_to<double>();
    std::vector<double> s4(cfg.replicates), m4(cfg.replicates);
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      auto ss = scenery_stream(cfg.master_seed, omega, r);
      const auto x = sample_scenery(keys, cfg.model, ss);
      double partial = 0.0, peak = 0.0;
      for (auto i : idx) {
        partial += x.values[i];
        peak = std::max(peak, std::abs(partial));
      }
      s4[r] = std::pow(partial, 4);
      m4[r] = std::pow(peak, 4);
    }
    out.s4 = mean_estimate(s4);
    out.m4 = mean_estimate(m4);
  });

  for (std::size_t omega = 0; omega < results.size(); ++omega) {
    const auto& r = results[omega];
    report.estimate(indexed("ES4_exact", "omega", omega), r.exact);
    report.estimate(indexed("ES4_mc", "omega", omega), r.s4.mean, r.s4.std_error, cfg.replicates);
    report.estimate(indexed("EM4_mc", "omega", omega), r.m4.mean, r.m4.std_error, cfg.replicates);
    report.estimate(indexed("G0", "omega", omega), r.g0);
    report.estimate(indexed("EM4_over_G0sq", "omega", omega), r.m4.mean / (r.g0 * r.g0));
    const double z = r.s4.std_error > 0 ? std::abs(r.s4.mean - r.exact) / r.s4.std_error
                                        : (r.s4.mean == r.exact ? 0.0 : INFINITY);
    report.check(indexed("fourth_moment_match", "omega", omega), z, kNotApplicable, 4.0,
                 cfg.replicates);
    report.check(indexed("moricz_bound", "omega", omega), r.m4.mean + 4.0 * r.m4.std_error,
                 kNotApplicable, cmax * r.g0 * r.g0, cfg.replicates);
  }

  if (cfg.n >= 3 && options.superadditivity_splits > 0) {
    // V is a sum of squared counts, so super-additivity is exact in integers.
    auto aux = auxiliary_stream(cfg.master_seed, 0x6d6f7269);  // "mori"
    const auto& path = paths.front();
    bool ok = true;
    for (std::size_t t = 0; t < options.superadditivity_splits; ++t) {
      const std::size_t b = aux.uniform_below(cfg.n - 1);
      const std::size_t k = 1 + aux.uniform_below(cfg.n - b - 1);
      const std::size_t l = 1 + aux.uniform_below(cfg.n - b - k);
      const auto vj = power_sum(occupation(path, {b, k}), 2);
      const auto vk = power_sum(occupation(path, {b + k, l}), 2);
      const auto vjk = power_sum(occupation(path, {b, k + l}), 2);
      ok &= vj + vk <= vjk;
    }
    report.flag("G0_superadditive", ok, options.superadditivity_splits);
  }
  return report;
}

double TruncationSplit::bounded(double x) const {
  return (x <= moments.level ? x : 0.0) - moments.bounded_mean;
}

double TruncationSplit::tail(double x) const {
  return (x > moments.level ? x : 0.0) - moments.tail_mean;
}

TruncationSplit truncation_split(const IidLaw& law, double level) {
  return {law, law.truncation(level)};
}

StatReport truncation_report(const IidLaw& law, std::span<const double> levels,
                             std::size_t samples, std::uint64_t master_seed) {
  if (samples < 2) throw ValidationError("samples", "need at least two samples");
  StatReport report;
  report.experiment = "truncation";
  report.provenance.master_seed = master_seed;
  std::vector<double> sorted(levels.begin(), levels.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> xs(samples);
  auto stream = auxiliary_stream(master_seed, 0x7472756e);  // "trun"
  for (auto& x : xs) x = law.sample(stream);

  bool monotone = true;
  double previous = INFINITY;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto split = truncation_split(law, sorted[i]);
    const auto& m = split.moments;
    std::vector<double> hat(samples), tilde(samples);
    double recomposition = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      hat[k] = split.bounded(xs[k]);
      tilde[k] = split.tail(xs[k]);
      recomposition = std::max(recomposition, std::abs(hat[k] + tilde[k] - xs[k]));
    }
    const auto tail_var = variance_estimate(tilde);
    const auto tail_mean = mean_estimate(tilde);
    const auto hat_mean = mean_estimate(hat);
    const std::string tag = "[L=" + format_double(m.level) + "]";
    report.estimate("tail_variance_closed" + tag, m.tail_variance);
    report.estimate("tail_variance_mc" + tag, tail_var.mean, tail_var.std_error, samples);
    report.estimate("bounded_variance_closed" + tag, m.bounded_variance);
    report.estimate("tail_second_moment" + tag, m.tail_second_moment);
    report.check("tail_variance_match" + tag, std::abs(tail_var.mean - m.tail_variance),
                 kNotApplicable, 4.0 * tail_var.std_error + 1e-12, samples);
    report.check("tail_centered" + tag, std::abs(tail_mean.mean), kNotApplicable,
                 4.0 * tail_mean.std_error + 1e-12, samples);
    report.check("bounded_centered" + tag, std::abs(hat_mean.mean), kNotApplicable,
                 4.0 * hat_mean.std_error + 1e-12, samples);
    report.check("recomposition" + tag, recomposition, kNotApplicable,
                 1e-12 * std::max(1.0, std::abs(m.bounded_mean) + std::abs(m.tail_mean)), samples);
    monotone &= m.tail_second_moment <= previous;
    previous = m.tail_second_moment;
  }
  report.flag("tail_second_moment_nonincreasing", monotone, sorted.size());
  report.notes.push_back("the truncation is one-sided; Var of the tail part need not decrease in L");
  return report;
}

StatReport estimate_c0(const StepDistribution& walk, std::span<const std::size_t> n_grid,
                       std::size_t paths, std::uint64_t master_seed, unsigned workers) {
  if (n_grid.size() < 4) throw ValidationError("grid", "C0 estimation needs at least 4 values of n");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 2) {
    throw ValidationError("grid", "n grid must be increasing and start at 2 or more");
  }
  if (paths < 1) throw ValidationError("replicates", "need at least one path");
  const auto dist = validate_distribution(walk);
  if (!dist.aperiodic) throw ValidationError("not_aperiodic", "the walk is not aperiodic");

  StatReport report;
  report.experiment = "estimate_c0";
  report.provenance.master_seed = master_seed;
  const auto walks = sample_walks(walk, n_grid.back(), paths, master_seed, workers);
  std::vector<double> v(paths * n_grid.size());
  parallel_for(paths, workers, [&](std::size_t i) {
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
      const auto w = occupation(walks[i], {0, n_grid[g]});
      v[i * n_grid.size() + g] = power_sum(w, 2).convert_to<double>();
    }
  });
  std::vector<double> x, y;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::vector<double> col;
    for (std::size_t i = 0; i < paths; ++i) col.push_back(v[i * n_grid.size() + g]);
    const auto m = mean_estimate(col);
    report.estimate(indexed("mean_V", "n", n_grid[g]), m.mean, m.std_error, paths);
    x.push_back(n_log_n(n_grid[g]));
    y.push_back(m.mean);
  }
  const auto fit = fit_line(x, y);
  report.estimate("C0_estimate", fit.slope, fit.slope_std_error, paths);
  report.estimate("intercept", fit.intercept);
  if (dist.centered() && dist.covariance_determinant() != 0) {
    const double formula = c0_formula(dist);
    report.estimate("C0_formula", formula);
    report.estimate("relative_error", std::abs(fit.slope - formula) / formula);
  }
  report.check("C0_positive", fit.slope, 0.0, kNotApplicable, paths);
  return report;
}

StatReport variance_experiment(const ExperimentConfig& cfg) {
  auto checked = cfg;
  checked.replicates = std::max<std::size_t>(cfg.replicates, 1);
  validate_config(checked, false);
  StatReport report;
  report.experiment = "variance";
  report.provenance.master_seed = cfg.master_seed;
  const auto table = correlation_table(cfg.model, cfg.correlation_radius);
  const double phi0 = table.window_sum();
  const double limit = phi0 * cfg.c0;
  report.estimate("phi0", phi0);
  report.estimate("phi0_tail_bound", table.tail_bound);
  report.estimate("asymptotic_variance", limit);

  struct Result {
    VarianceResult exact;
    MeanEstimate mc;
  };
  std::vector<Result> results(cfg.omega_replicates);
  parallel_for(cfg.omega_replicates, cfg.workers, [&](std::size_t omega) {
    auto ws = walk_stream(cfg.master_seed, omega);
    const auto path = sample_path(cfg.walk, cfg.n, ws);
    const auto w = occupation(path, {0, cfg.n});
    const WeightedField wf{&w, 1.0};
    results[omega].exact = variance_exact(std::span(&wf, 1), table);
    if (cfg.replicates == 0) return;
    const auto keys = w.keys();
    const auto pos = positions_in(keys, w);
    std::vector<double> s(cfg.replicates);
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      auto ss = scenery_stream(cfg.master_seed, omega, r);
      s[r] = dot(w.counts(), pos, sample_scenery(keys, cfg.model, ss).values);
    }
    results[omega].mc = variance_estimate(s);
  });

  std::vector<double> ratios;
  for (std::size_t omega = 0; omega < results.size(); ++omega) {
    const auto& r = results[omega];
    const double ratio = r.exact.value / n_log_n(cfg.n) / limit;
    ratios.push_back(ratio);
    report.estimate(indexed("variance_exact", "omega", omega), r.exact.value, r.exact.error_bound);
    report.estimate(indexed("ratio", "omega", omega), ratio);
    if (cfg.replicates > 0) {
      report.estimate(indexed("variance_mc", "omega", omega), r.mc.mean, r.mc.std_error,
                      cfg.replicates);
      report.check(indexed("variance_match", "omega", omega), std::abs(r.mc.mean - r.exact.value),
                   kNotApplicable, 4.0 * r.mc.std_error + r.exact.error_bound, cfg.replicates);
    }
  }
  const auto mean_ratio = mean_estimate(ratios);
  report.check("variance_ratio_mean", mean_ratio.mean, cfg.variance_band[0], cfg.variance_band[1],
               ratios.size());
  return report;
}

StatReport toral_agreement(const ToralModel& model, int radius, std::size_t points,
                           std::uint64_t master_seed) {
  validate_model(model);
  if (radius < 0) throw ValidationError("radius", "radius must be >= 0");
  if (points < 2) throw ValidationError("samples", "need at least two points");
  const std::uint64_t q = model.modulus;
  const std::size_t rho = model.action.dimension();
  const int width = 2 * radius + 1;

  // Generator powers mod q for every exponent in the window.
  const auto px = model.action.generator_powers_mod(1, -radius, radius, q);
  const auto py = model.action.generator_powers_mod(2, -radius, radius, q);
  const ToralEvaluator f(model.observable, q);
  const auto exact = toral_correlation_window(model, radius);

  std::vector<RunningStats> stats(static_cast<std::size_t>(width * width));
  double max_imag = 0.0;
  auto stream = auxiliary_stream(master_seed, 0x746f7261);  // "tora"
  std::vector<std::uint64_t> p(rho), u(rho), y(rho);
  for (std::size_t t = 0; t < points; ++t) {
    for (auto& c : p) c = stream.uniform_below(q);
    const auto x0 = f(p.data());
    max_imag = std::max(max_imag, std::abs(x0.imag()));
    for (int a = 0; a < width; ++a) {
      px[static_cast<std::size_t>(a)].apply(p.data(), u.data());
      for (int b = 0; b < width; ++b) {
        py[static_cast<std::size_t>(b)].apply(u.data(), y.data());
        const auto xl = f(y.data());
        max_imag = std::max(max_imag, std::abs(xl.imag()));
        stats[static_cast<std::size_t>(a * width + b)].add(xl.real() * x0.real());
      }
    }
  }

  StatReport report;
  report.experiment = "toral_agreement";
  report.provenance.master_seed = master_seed;
  report.estimate("max_imaginary_part", max_imag);
  report.check("values_real", max_imag, kNotApplicable, 1e-9, points);
  for (int a = 0; a < width; ++a) {
    for (int b = 0; b < width; ++b) {
      const Point l{a - radius, b - radius};
      const auto& s = stats[static_cast<std::size_t>(a * width + b)];
      const double target = exact[static_cast<std::size_t>(a * width + b)];
      report.check(indexed_point("correlation_match", l), std::abs(s.mean() - target),
                   kNotApplicable, 4.0 * s.std_error() + 1e-12, points);
    }
  }
  return report;
}

}  // namespace rwrs
