#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "rwrs/cumulant.hpp"
#include "rwrs/stats.hpp"

namespace rwrs::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string tagged(const std::string& name, const std::string& key, std::size_t v) {
  return name + "[" + key + "=" + std::to_string(v) + "]";
}

StatReport run_lln(AppConfig& cfg) {
  const auto& ex = cfg.experiment;
  StatReport report;
  const double c0 = resolve_c0(cfg, report.notes);
  auto grid = cfg.lln.n_grid;
  if (grid.empty()) throw ValidationError("grid", "lln.n_grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("grid", "lln.n_grid must increase");
  const auto paths = sample_walks(ex.walk, grid.back(), cfg.lln.paths, ex.master_seed, ex.workers);
  auto table = lln_table(paths, grid, c0, cfg.lln.options);
  table.notes.insert(table.notes.begin(), report.notes.begin(), report.notes.end());

  // Kernel Fourier ratios at the largest n.
  std::vector<double> ratios(paths.size() * 3);
  const Point ps[3] = {{1, 0}, {0, 1}, {1, 1}};
  parallel_for(paths.size(), ex.workers, [&](std::size_t i) {
    const auto w = occupation(paths[i], {0, grid.back()});
    for (int k = 0; k < 3; ++k) ratios[i * 3 + k] = kernel_fourier_ratio(w, ps[k]);
  });
  for (int k = 0; k < 3; ++k) {
    std::vector<double> col;
    for (std::size_t i = 0; i < paths.size(); ++i) col.push_back(ratios[i * 3 + k]);
    const auto m = mean_estimate(col);
    table.estimate("kernel_ratio[p=(" + std::to_string(ps[k].x) + "," + std::to_string(ps[k].y) + ")]",
                   m.mean, m.std_error, paths.size());
  }
  table.estimate("C0", c0);
  return table;
}

StatReport run_fclt(AppConfig& cfg) {
  auto& ex = cfg.experiment;
  std::vector<std::string> notes;
  ex.c0 = resolve_c0(cfg, notes);
  auto report = fclt_experiment(ex);
  report.notes.insert(report.notes.end(), notes.begin(), notes.end());
  auto stream = walk_stream(ex.master_seed, 0);
  const auto path = sample_path(ex.walk, ex.n, stream);
  const auto ct = cross_term_diagnostic(path, cfg.cross_term.a, cfg.cross_term.p, ex.c0);
  report.estimate("cross_term", ct.value, kNotApplicable, 1);
  report.estimate("cross_count", static_cast<double>(ct.cross_count), kNotApplicable, 1);
  report.check("cross_term_small", ct.value, kNotApplicable, cfg.cross_term.max_value, 1);
  report.flag("cross_term_additive", ct.additive, 1);
  return report;
}

StatReport run_variance(AppConfig& cfg) {
  auto& ex = cfg.experiment;
  std::vector<std::string> notes;
  ex.c0 = resolve_c0(cfg, notes);
  auto report = variance_experiment(ex);
  report.notes.insert(report.notes.end(), notes.begin(), notes.end());
  return report;
}

std::uint64_t bell_number(int r) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i < r; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.back();
}

StatReport run_cumulants(AppConfig& cfg) {
  const auto& ex = cfg.experiment;
  validate_model(ex.model);
  StatReport report;
  report.experiment = "cumulants";

  bool bell_ok = true;
  for (int r = 1; r <= 8; ++r) bell_ok &= partitions(r).size() == bell_number(r);
  report.flag("partition_counts_bell", bell_ok, 8);

  if (const auto* law = std::get_if<IidLaw>(&ex.model)) {
    double worst = 0.0;
    for (int r = 1; r <= 6; ++r) {
      std::vector<double> mom(static_cast<std::size_t>(r) + 1);
      for (int j = 0; j <= r; ++j) mom[static_cast<std::size_t>(j)] = law->moment(j);
      const double back = moments_from_cumulants(
          [&](IndexSet s) { return law->cumulant(std::popcount(s)); }, r);
      worst = std::max(worst, std::abs(back - mom[static_cast<std::size_t>(r)]));
      report.estimate(tagged("cumulant", "r", static_cast<std::size_t>(r)), single_cumulant(mom, r));
    }
    report.check("moment_cumulant_round_trip", worst, kNotApplicable, 1e-10, 6);
  }

  if (std::holds_alternative<MovingAverage>(ex.model)) {
    report.notes.push_back("Leonov statistics are not available for moving averages");
    return report;
  }
  auto grid = cfg.cumulants.n_grid;
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end())) {
    throw ValidationError("grid", "cumulants.n_grid must be nonempty and increasing");
  }
  auto stream = walk_stream(ex.master_seed, 0);
  const auto path = sample_path(ex.walk, grid.back(), stream);
  for (int r : cfg.cumulants.orders) {
    double previous = INFINITY;
    bool decreasing = true, certified = true;
    for (auto n : grid) {
      const auto w = occupation(path, {0, n});
      const auto res = leonov_statistic(w, ex.model, r, cfg.cumulants.search_radius);
      const std::string tag = "[r=" + std::to_string(r) + ",n=" + std::to_string(n) + "]";
      report.estimate("leonov" + tag, res.statistic);
      report.estimate("leonov_range" + tag, res.range);
      decreasing &= std::abs(res.statistic) <= previous;
      previous = std::abs(res.statistic);
      certified &= res.certified;
    }
    report.flag(tagged("leonov_decreasing", "r", static_cast<std::size_t>(r)), decreasing, grid.size());
    report.flag(tagged("leonov_certified", "r", static_cast<std::size_t>(r)), certified, grid.size());
  }
  return report;
}

StatReport run_maximal(AppConfig& cfg) {
  auto& ex = cfg.experiment;
  std::vector<std::string> notes;
  ex.c0 = resolve_c0(cfg, notes);
  StatReport report;
  report.experiment = "maximal";
  report.notes = notes;
  report.merge(newman_wright_check(ex, cfg.maximal.lambda), "newman_wright/");
  if (std::holds_alternative<IidLaw>(ex.model)) {
    MoriczOptions opts;
    opts.interval = cfg.maximal.interval;
    opts.superadditivity_splits = cfg.maximal.superadditivity_splits;
    report.merge(moricz_check(ex, opts), "moricz/");
  } else {
    report.notes.push_back("Moricz check needs an iid scenery; skipped");
  }
  return report;
}

StatReport run_toral(AppConfig& cfg) {
  const auto& ex = cfg.experiment;
  const auto* model = std::get_if<ToralModel>(&ex.model);
  if (model == nullptr) throw ValidationError("model", "toral-verify needs a toral scenery");
  validate_model(ex.model);
  StatReport report;
  report.experiment = "toral_verify";
  const auto action = inspect_action(model->action.a1(), model->action.a2(), cfg.toral.check_radius);
  report.flag("commute", action.commute, 1);
  report.flag("unimodular", action.unimodular, 1);
  report.flag("unit_circle_free", action.unit_circle_free, static_cast<std::uint64_t>(cfg.toral.check_radius));
  report.estimate("det1", action.det1.convert_to<double>());
  report.estimate("det2", action.det2.convert_to<double>());
  report.estimate("min_unit_circle_distance", action.min_unit_circle_distance);
  report.estimate("spectrum_simple", action.spectrum_simple ? 1.0 : 0.0);
  if (!action.ok()) {
    report.notes.push_back("action checks failed; correlation checks skipped");
    return report;
  }
  const auto table = correlation_table(ex.model, ex.correlation_radius);
  report.estimate("phi0", table.window_sum());
  report.estimate("phi0_tail_bound", table.tail_bound);
  report.estimate("variance", table.at({0, 0}));
  report.merge(toral_agreement(*model, cfg.toral.agreement_radius, cfg.toral.points, ex.master_seed),
               "agreement/");
  return report;
}

StatReport run_estimate_c0(AppConfig& cfg) {
  const auto& ex = cfg.experiment;
  return estimate_c0(ex.walk, cfg.estimate_c0.n_grid, cfg.estimate_c0.paths, ex.master_seed,
                     ex.workers);
}

using Runner = StatReport (*)(AppConfig&);

struct Command {
  std::string name;
  Runner fn;
  std::string help;
};

const std::vector<Command>& registry() {
  static const std::vector<Command> r{
      {"lln", run_lln, "self-intersection law of large numbers and kernel ratios"},
      {"fclt", run_fclt, "finite-dimensional FCLT with KS tests and cross term"},
      {"variance", run_variance, "exact conditional variance against Monte Carlo"},
      {"cumulants", run_cumulants, "partitions, moment/cumulant round trips, Leonov statistic"},
      {"maximal", run_maximal, "Newman-Wright and Moricz maximal inequalities"},
      {"toral-verify", run_toral, "check a toral action and its correlations"},
      {"estimate-c0", run_estimate_c0, "fit C0 from mean self-intersections"}};
  return r;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("output", "cannot write '" + p.string() + "'");
  out << text;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : registry()) v.push_back(c.name);
    return v;
  }();
  return names;
}

StatReport run_experiment(const std::string& subcommand, AppConfig& cfg) {
  for (const auto& c : registry()) {
    if (c.name == subcommand) {
      auto report = c.fn(cfg);
      report.provenance.config_hash = config_hash(cfg);
      report.provenance.master_seed = cfg.experiment.master_seed;
      return report;
    }
  }
  throw ValidationError("subcommand", "unknown subcommand '" + subcommand + "'");
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Random walk in random scenery experiments"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", format = "both";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  app.add_option("--config", config_path, "YAML configuration file")->envname("RWRS_CONFIG");
  app.add_option("--seed", seed, "master seed (overrides the config)")->envname("RWRS_SEED");
  app.add_option("--workers", workers, "worker threads")->envname("RWRS_WORKERS");
  app.add_option("--out", out_dir, "output directory")->envname("RWRS_OUT");
  app.add_option("--format", format, "csv, json or both")
      ->envname("RWRS_FORMAT")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  for (const auto& c : registry()) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    AppConfig cfg = config_path.empty() ? parse_config(YAML::Node()) : load_config(config_path);
    if (seed) {
      cfg.experiment.master_seed = *seed;
      cfg.canonical["seed"] = *seed;
    }
    if (workers) cfg.experiment.workers = *workers;
    if (cfg.experiment.workers < 1) throw ValidationError("workers", "need at least one worker");

    const auto start = std::chrono::steady_clock::now();
    const auto report = run_experiment(sub, cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    std::string stem = sub;
    std::replace(stem.begin(), stem.end(), '-', '_');
    Json outputs = Json::array();
    if (format != "json") {
      write_file(dir / (stem + ".csv"), to_csv(report));
      outputs.push_back((dir / (stem + ".csv")).string());
    }
    if (format != "csv") {
      write_file(dir / (stem + ".json"), to_json(report) + "\n");
      outputs.push_back((dir / (stem + ".json")).string());
    }
    Json manifest{{"tool_version", kToolVersion},
                  {"subcommand", sub},
                  {"config_hash", report.provenance.config_hash},
                  {"master_seed", cfg.experiment.master_seed},
                  {"workers", cfg.experiment.workers},
                  {"outputs", outputs},
                  {"timings", {{sub, seconds}}},
                  {"config", cfg.canonical}};
    write_file(dir / (stem + "_manifest.json"), manifest.dump(2) + "\n");

    std::size_t failed = 0;
    for (const auto& v : report.verdicts) {
      if (!v.passed) {
        ++failed;
        std::cerr << "FAIL " << v.name << " statistic=" << format_double(v.statistic) << '\n';
      }
    }
    std::cout << sub << ": " << report.verdicts.size() - failed << "/" << report.verdicts.size()
              << " verdicts passed (config " << report.provenance.config_hash << ")\n";
    return failed == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rwrs::cli
