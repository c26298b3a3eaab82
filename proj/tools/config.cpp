#include <cmath>
#include <cstdio>
#include <sstream>

#include "cli.hpp"

namespace rwrs::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ValidationError("config", message); }

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail("bad value for '" + key + "'");
  }
}

template <class T>
T get(const YAML::Node& parent, const std::string& key, T fallback) {
  const auto node = parent[key];
  return node ? scalar<T>(node, key) : fallback;
}

void reject_unknown(const YAML::Node& node, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!node || node.IsNull()) return;
  if (!node.IsMap()) fail("'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed) known |= key == a;
    if (!known) fail("unknown key '" + key + "' in '" + where + "'");
  }
}

Rational parse_rational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt num(text.substr(0, slash));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) fail("zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    fail("probability '" + text + "' is not of the form num/den");
  }
}

Point parse_point(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() != 2) fail("'" + key + "' must be [x, y]");
  return {scalar<std::int64_t>(node[0], key), scalar<std::int64_t>(node[1], key)};
}

std::vector<std::vector<std::int64_t>> parse_matrix(const YAML::Node& node, const std::string& key) {
  if (!node || !node.IsSequence()) fail("'" + key + "' must be a list of integer rows");
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& row : node) rows.push_back(scalar<std::vector<std::int64_t>>(row, key));
  return rows;
}

StepDistribution parse_walk(const YAML::Node& node, Json& canon) {
  reject_unknown(node, "walk", {"preset", "steps"});
  if (!node || node["preset"]) {
    const auto preset = node ? scalar<std::string>(node["preset"], "preset") : "simple_symmetric";
    if (preset != "simple_symmetric") fail("unknown walk preset '" + preset + "'");
  }
  std::vector<StepAtom> atoms;
  if (node && node["steps"]) {
    for (const auto& s : node["steps"]) {
      reject_unknown(s, "walk.steps", {"step", "p"});
      atoms.push_back({parse_point(s["step"], "step"),
                       parse_rational(scalar<std::string>(s["p"], "p"))});
    }
  }
  const auto d = atoms.empty() ? StepDistribution::simple_symmetric() : StepDistribution(atoms);
  Json steps = Json::array();
  for (const auto& a : d.atoms()) {
    steps.push_back({{"step", {a.step.x, a.step.y}}, {"p", a.probability.str()}});
  }
  canon["walk"] = steps;
  return d;
}

IidLaw parse_law(const YAML::Node& node, Json& canon) {
  reject_unknown(node, "law", {"type", "variance", "half_width", "low", "high"});
  const auto type = node ? get<std::string>(node, "type", "gaussian") : "gaussian";
  IidLaw law = IidLaw::gaussian();
  if (type == "gaussian") {
    law = IidLaw::gaussian(node ? get<double>(node, "variance", 1.0) : 1.0);
    canon = {{"type", type}, {"variance", law.variance()}};
  } else if (type == "rademacher") {
    law = IidLaw::rademacher(get<double>(node, "variance", 1.0));
    canon = {{"type", type}, {"variance", law.variance()}};
  } else if (type == "uniform") {
    law = IidLaw::uniform(get<double>(node, "half_width", 1.0));
    canon = {{"type", type}, {"half_width", law.low()}};
  } else if (type == "two_point") {
    law = IidLaw::two_point(get<double>(node, "low", -1.0), get<double>(node, "high", 1.0));
    canon = {{"type", type}, {"low", law.low()}, {"high", law.high()}};
  } else {
    fail("unknown law type '" + type + "'");
  }
  return law;
}

TrigPolynomial parse_terms(const YAML::Node& node, int dim, const std::string& key) {
  TrigPolynomial f(dim);
  if (!node || !node.IsSequence()) fail("'" + key + "' must be a list of terms");
  for (const auto& t : node) {
    reject_unknown(t, key, {"k", "cos", "sin", "re", "im"});
    const auto k = scalar<std::vector<std::int64_t>>(t["k"], "k");
    if (t["cos"]) f.add_cosine(k, scalar<double>(t["cos"], "cos"));
    if (t["sin"]) f.add_sine(k, scalar<double>(t["sin"], "sin"));
    if (t["re"] || t["im"]) f.add_pair(k, {get<double>(t, "re", 0.0), get<double>(t, "im", 0.0)});
  }
  return f;
}

ToralModel parse_toral(const YAML::Node& node, Json& canon) {
  reject_unknown(node, "scenery", {"kind", "preset", "a1", "a2", "observable", "coboundary", "modulus"});
  const bool preset = !node["a1"] && !node["a2"];
  if (preset && get<std::string>(node, "preset", "reference") != "reference") {
    fail("unknown toral preset");
  }
  ToralAction action = preset ? ToralAction::reference_example()
                              : ToralAction(IntMatrix::from_rows(parse_matrix(node["a1"], "a1")),
                                            IntMatrix::from_rows(parse_matrix(node["a2"], "a2")));
  const int dim = action.dimension();
  TrigPolynomial f(dim);
  if (node["coboundary"]) {
    const auto cb = node["coboundary"];
    reject_unknown(cb, "coboundary", {"direction", "g"});
    f = coboundary(parse_terms(cb["g"], dim, "coboundary.g"), get<int>(cb, "direction", 1), action);
  } else if (node["observable"]) {
    f = parse_terms(node["observable"], dim, "observable");
  } else {
    Frequency e1(static_cast<std::size_t>(dim), 0);
    e1[0] = 1;
    f.add_cosine(e1, 2.0);
  }
  if (node["observable"] && node["coboundary"]) fail("give either 'observable' or 'coboundary'");
  const auto modulus = get<std::uint64_t>(node, "modulus", kDefaultToralModulus);

  auto rows = [](const IntMatrix& m) {
    Json out = Json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j).str());
      out.push_back(row);
    }
    return out;
  };
  Json terms = Json::array();
  for (const auto& [k, c] : f.terms()) terms.push_back({{"k", k}, {"re", c.real()}, {"im", c.imag()}});
  canon = {{"kind", "toral"}, {"a1", rows(action.a1())}, {"a2", rows(action.a2())},
           {"observable", terms}, {"modulus", modulus}};
  return {std::move(action), std::move(f), modulus};
}

SceneryModel parse_scenery(const YAML::Node& node, Json& canon) {
  const auto kind = node ? get<std::string>(node, "kind", "iid") : "iid";
  if (kind == "iid") {
    reject_unknown(node, "scenery", {"kind", "law"});
    Json law;
    auto m = parse_law(node ? node["law"] : YAML::Node(), law);
    canon = {{"kind", kind}, {"law", law}};
    return m;
  }
  if (kind == "moving_average") {
    reject_unknown(node, "scenery", {"kind", "base", "coefficients"});
    MovingAverage ma;
    Json base;
    ma.base = parse_law(node["base"], base);
    Json coeffs = Json::array();
    if (!node["coefficients"]) fail("moving average needs 'coefficients'");
    for (const auto& c : node["coefficients"]) {
      reject_unknown(c, "coefficients", {"at", "a"});
      ma.coefficients[parse_point(c["at"], "at")] += scalar<double>(c["a"], "a");
    }
    for (const auto& [q, a] : ma.coefficients) coeffs.push_back({{"at", {q.x, q.y}}, {"a", a}});
    canon = {{"kind", kind}, {"base", base}, {"coefficients", coeffs}};
    return ma;
  }
  if (kind == "toral") return parse_toral(node, canon);
  fail("unknown scenery kind '" + kind + "'");
}

template <class T>
std::vector<T> get_list(const YAML::Node& parent, const std::string& key, std::vector<T> fallback) {
  const auto node = parent[key];
  return node ? scalar<std::vector<T>>(node, key) : fallback;
}

}  // namespace

AppConfig parse_config(const YAML::Node& root) {
  if (root && !root.IsMap() && !root.IsNull()) fail("top level must be a mapping");
  const YAML::Node top = root.IsMap() ? root : YAML::Node(YAML::NodeType::Map);
  reject_unknown(top, "top level",
                 {"seed", "workers", "c0", "walk", "scenery", "experiment", "lln", "cross_term",
                  "maximal", "cumulants", "toral_verify", "estimate_c0"});
  AppConfig cfg;
  Json& canon = cfg.canonical;
  auto& ex = cfg.experiment;

  ex.master_seed = get<std::uint64_t>(top, "seed", 1);
  ex.workers = get<unsigned>(top, "workers", 1);
  canon["seed"] = ex.master_seed;

  const auto c0 = top["c0"];
  if (!c0 || c0.as<std::string>() == "auto") {
    canon["c0"] = "auto";
  } else if (c0.as<std::string>() == "formula") {
    cfg.c0.kind = C0Source::Kind::kFormula;
    canon["c0"] = "formula";
  } else {
    cfg.c0 = {C0Source::Kind::kValue, scalar<double>(c0, "c0")};
    canon["c0"] = cfg.c0.value;
  }

  ex.walk = parse_walk(top["walk"], canon);
  Json scen;
  ex.model = parse_scenery(top["scenery"], scen);
  canon["scenery"] = scen;

  const auto e = top["experiment"];
  reject_unknown(e, "experiment",
                 {"n", "time_grid", "replicates", "omega_replicates", "normalization",
                  "correlation_radius", "alpha", "ks_pass_fraction", "variance_band"});
  if (e) {
    ex.n = get<std::size_t>(e, "n", ex.n);
    ex.time_grid = get_list<double>(e, "time_grid", ex.time_grid);
    ex.replicates = get<std::size_t>(e, "replicates", ex.replicates);
    ex.omega_replicates = get<std::size_t>(e, "omega_replicates", ex.omega_replicates);
    const auto norm = get<std::string>(e, "normalization", "paper");
    if (norm != "paper" && norm != "exact") fail("normalization must be 'paper' or 'exact'");
    ex.normalization = norm == "exact" ? Normalization::kExact : Normalization::kPaper;
    ex.correlation_radius = get<int>(e, "correlation_radius", ex.correlation_radius);
    ex.alpha = get<double>(e, "alpha", ex.alpha);
    ex.ks_pass_fraction = get<double>(e, "ks_pass_fraction", ex.ks_pass_fraction);
    const auto band = get_list<double>(e, "variance_band", {ex.variance_band[0], ex.variance_band[1]});
    if (band.size() != 2 || !(band[0] < band[1])) fail("variance_band must be [low, high]");
    ex.variance_band = {band[0], band[1]};
  }
  canon["experiment"] = {{"n", ex.n},
                         {"time_grid", ex.time_grid},
                         {"replicates", ex.replicates},
                         {"omega_replicates", ex.omega_replicates},
                         {"normalization", ex.normalization == Normalization::kExact ? "exact" : "paper"},
                         {"correlation_radius", ex.correlation_radius},
                         {"alpha", ex.alpha},
                         {"ks_pass_fraction", ex.ks_pass_fraction},
                         {"variance_band", ex.variance_band}};

  if (const auto l = top["lln"]) {
    reject_unknown(l, "lln", {"n_grid", "paths", "epsilon", "band", "toward_one_fraction"});
    cfg.lln.n_grid = get_list<std::size_t>(l, "n_grid", cfg.lln.n_grid);
    cfg.lln.paths = get<std::size_t>(l, "paths", cfg.lln.paths);
    cfg.lln.options.epsilon = get<double>(l, "epsilon", cfg.lln.options.epsilon);
    const auto band = get_list<double>(l, "band", {cfg.lln.options.band_lower, cfg.lln.options.band_upper});
    if (band.size() != 2) fail("lln.band must be [low, high]");
    cfg.lln.options.band_lower = band[0];
    cfg.lln.options.band_upper = band[1];
    cfg.lln.options.toward_one_fraction =
        get<double>(l, "toward_one_fraction", cfg.lln.options.toward_one_fraction);
  }
  canon["lln"] = {{"n_grid", cfg.lln.n_grid},
                  {"paths", cfg.lln.paths},
                  {"epsilon", cfg.lln.options.epsilon},
                  {"band", {cfg.lln.options.band_lower, cfg.lln.options.band_upper}},
                  {"toward_one_fraction", cfg.lln.options.toward_one_fraction}};

  if (const auto c = top["cross_term"]) {
    reject_unknown(c, "cross_term", {"a", "p", "max"});
    cfg.cross_term.a = get<double>(c, "a", cfg.cross_term.a);
    if (c["p"]) cfg.cross_term.p = parse_point(c["p"], "p");
    cfg.cross_term.max_value = get<double>(c, "max", cfg.cross_term.max_value);
  }
  canon["cross_term"] = {{"a", cfg.cross_term.a},
                         {"p", {cfg.cross_term.p.x, cfg.cross_term.p.y}},
                         {"max", cfg.cross_term.max_value}};

  if (const auto m = top["maximal"]) {
    reject_unknown(m, "maximal", {"lambda", "interval", "superadditivity_splits"});
    cfg.maximal.lambda = get<double>(m, "lambda", cfg.maximal.lambda);
    if (m["interval"]) {
      const auto iv = scalar<std::vector<std::size_t>>(m["interval"], "interval");
      if (iv.size() != 2) fail("maximal.interval must be [begin, length]");
      cfg.maximal.interval = {iv[0], iv[1]};
    }
    cfg.maximal.superadditivity_splits =
        get<std::size_t>(m, "superadditivity_splits", cfg.maximal.superadditivity_splits);
  }
  canon["maximal"] = {{"lambda", cfg.maximal.lambda},
                      {"interval", {cfg.maximal.interval.begin, cfg.maximal.interval.length}},
                      {"superadditivity_splits", cfg.maximal.superadditivity_splits}};

  if (const auto c = top["cumulants"]) {
    reject_unknown(c, "cumulants", {"orders", "n_grid", "search_radius"});
    cfg.cumulants.orders = get_list<int>(c, "orders", cfg.cumulants.orders);
    cfg.cumulants.n_grid = get_list<std::size_t>(c, "n_grid", cfg.cumulants.n_grid);
    cfg.cumulants.search_radius = get<int>(c, "search_radius", cfg.cumulants.search_radius);
  }
  canon["cumulants"] = {{"orders", cfg.cumulants.orders},
                        {"n_grid", cfg.cumulants.n_grid},
                        {"search_radius", cfg.cumulants.search_radius}};

  if (const auto t = top["toral_verify"]) {
    reject_unknown(t, "toral_verify", {"check_radius", "agreement_radius", "points"});
    cfg.toral.check_radius = get<int>(t, "check_radius", cfg.toral.check_radius);
    cfg.toral.agreement_radius = get<int>(t, "agreement_radius", cfg.toral.agreement_radius);
    cfg.toral.points = get<std::size_t>(t, "points", cfg.toral.points);
  }
  canon["toral_verify"] = {{"check_radius", cfg.toral.check_radius},
                           {"agreement_radius", cfg.toral.agreement_radius},
                           {"points", cfg.toral.points}};

  if (const auto c = top["estimate_c0"]) {
    reject_unknown(c, "estimate_c0", {"n_grid", "paths"});
    cfg.estimate_c0.n_grid = get_list<std::size_t>(c, "n_grid", cfg.estimate_c0.n_grid);
    cfg.estimate_c0.paths = get<std::size_t>(c, "paths", cfg.estimate_c0.paths);
  }
  canon["estimate_c0"] = {{"n_grid", cfg.estimate_c0.n_grid}, {"paths", cfg.estimate_c0.paths}};
  return cfg;
}

AppConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    fail("cannot read '" + path + "'");
  } catch (const YAML::Exception& e) {
    fail(std::string("malformed YAML: ") + e.what());
  }
  return parse_config(root);
}

std::string config_hash(const AppConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : cfg.canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double resolve_c0(const AppConfig& cfg, std::vector<std::string>& notes) {
  if (cfg.c0.kind == C0Source::Kind::kValue) return cfg.c0.value;
  const auto report = validate_distribution(cfg.experiment.walk);
  if (report.c0) return *report.c0;
  const bool formula_applies =
      report.aperiodic && report.centered() && report.covariance_determinant() != 0;
  if (cfg.c0.kind == C0Source::Kind::kFormula || formula_applies) {
    if (!report.centered() || report.covariance_determinant() == 0) {
      throw ValidationError("empirical_c0_required", "no closed form C0 for this walk");
    }
    notes.push_back("C0 from (pi sqrt(det Sigma))^-1 for a walk that is not strongly aperiodic");
    return c0_formula(report);
  }
  throw ValidationError("empirical_c0_required",
                        "walk is not aperiodic; set c0 explicitly or run estimate-c0");
}

}  // namespace rwrs::cli
