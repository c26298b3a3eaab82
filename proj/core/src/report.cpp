#include "rwrs/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace rwrs {

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void StatReport::estimate(std::string name, double value, double std_error,
                          std::uint64_t sample_size) {
  estimates.push_back({std::move(name), value, std_error, sample_size});
}

const Verdict& StatReport::check(std::string name, double statistic, double lower, double upper,
                                 std::uint64_t sample_size) {
  bool ok = !std::isnan(statistic);
  if (!std::isnan(lower)) ok = ok && statistic >= lower;
  if (!std::isnan(upper)) ok = ok && statistic <= upper;
  verdicts.push_back({std::move(name), ok, statistic, lower, upper, sample_size});
  return verdicts.back();
}

void StatReport::flag(std::string name, bool passed, std::uint64_t sample_size) {
  verdicts.push_back({std::move(name), passed, passed ? 1.0 : 0.0, 1.0, kNotApplicable,
                      sample_size});
}

bool StatReport::passed() const {
  for (const auto& v : verdicts) {
    if (!v.passed) return false;
  }
  return true;
}

const Estimate* StatReport::find_estimate(const std::string& name) const {
  for (const auto& e : estimates) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const Verdict* StatReport::find_verdict(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

void StatReport::merge(const StatReport& other, const std::string& prefix) {
  for (auto e : other.estimates) {
    e.name = prefix + e.name;
    estimates.push_back(std::move(e));
  }
  for (auto v : other.verdicts) {
    v.name = prefix + v.name;
    verdicts.push_back(std::move(v));
  }
  for (const auto& n : other.notes) notes.push_back(prefix + n);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string to_csv(const StatReport& report) {
  std::ostringstream out;
  out << "record,experiment,name,value,std_error,sample_size,lower,upper,passed\n";
  for (const auto& e : report.estimates) {
    out << "estimate," << csv_field(report.experiment) << ',' << csv_field(e.name) << ','
        << format_double(e.value) << ',' << format_double(e.std_error) << ',' << e.sample_size
        << ",,,\n";
  }
  for (const auto& v : report.verdicts) {
    out << "verdict," << csv_field(report.experiment) << ',' << csv_field(v.name) << ','
        << format_double(v.statistic) << ",," << v.sample_size << ','
        << format_double(v.lower) << ',' << format_double(v.upper) << ','
        << (v.passed ? "PASS" : "FAIL") << '\n';
  }
  return out.str();
}

std::string to_json(const StatReport& report, int indent) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["passed"] = report.passed();
  j["provenance"] = {{"config_hash", report.provenance.config_hash},
                     {"master_seed", report.provenance.master_seed}};
  auto& est = j["estimates"] = nlohmann::ordered_json::array();
  for (const auto& e : report.estimates) {
    est.push_back({{"name", e.name},
                   {"value", number_or_null(e.value)},
                   {"std_error", number_or_null(e.std_error)},
                   {"sample_size", e.sample_size}});
  }
  auto& ver = j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : report.verdicts) {
    ver.push_back({{"name", v.name},
                   {"passed", v.passed},
                   {"statistic", number_or_null(v.statistic)},
                   {"lower", number_or_null(v.lower)},
                   {"upper", number_or_null(v.upper)},
                   {"sample_size", v.sample_size}});
  }
  j["notes"] = report.notes;
  return j.dump(indent);
}

}  // namespace rwrs
