#include "fewlab/experiments.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace fewlab {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

long as_count(const Json& v, const char* key) {
  if (!v.is_number_integer())
    throw ConfigError(std::string("field '") + key + "' must be an integer");
  return v.get<long>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j,
                                             std::optional<std::uint64_t> fallback_seed) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "experiment", "supports", "params", "samples", "seed",
      "workers",    "output_dir", "plots"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");

  ExperimentConfig c;
  const Json& name = require(j, "experiment");
  if (!name.is_string()) throw ConfigError("field 'experiment' must be a string");
  c.experiment = name.get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");

  c.samples = as_count(require(j, "samples"), "samples");
  if (c.samples < 1) throw ConfigError("samples must be at least 1");

  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
      throw ConfigError("seed must be a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  } else {
    c.seed = fallback_seed.value_or(0);
  }
  if (j.contains("workers")) {
    c.workers = static_cast<int>(as_count(j.at("workers"), "workers"));
    if (c.workers < 1) throw ConfigError("workers must be at least 1");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      throw ConfigError("field 'output_dir' must be a string");
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("plots")) {
    if (!j.at("plots").is_boolean()) throw ConfigError("field 'plots' must be a boolean");
    c.plots = j.at("plots").get<bool>();
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("field 'params' must be an object");
    c.params = j.at("params");
  }
  if (j.contains("supports")) c.supports = j.at("supports");
  return c;
}

bool ReportRow::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.pass; });
}

double ReportRow::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

bool ExperimentReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.passed(); }) &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

namespace {

Json verdict_json(const Verdict& v) {
  return Json{{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}};
}

Json bounds_json(const BoundReport& b) {
  Json j;
  j["n"] = b.inputs.n;
  j["t"] = b.inputs.t;
  j["V0"] = b.inputs.V0;
  j["thm_mixed"] = b.thm_mixed;
  if (b.prop_unmixed) j["prop_unmixed"] = *b.prop_unmixed;
  if (b.betc_unmixed) j["betc_unmixed"] = *b.betc_unmixed;
  if (b.jindal) j["jindal"] = *b.jindal;
  j["kushnirenko_ref"] = b.kushnirenko_ref;
  if (b.lower_bound_ref) j["lower_bound_ref"] = *b.lower_bound_ref;
  j["conjecture_reference_scale"] = b.conjecture_reference_scale;
  return j;
}

std::string num(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : ""; }

// Quotes a CSV field when needed.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

Json report_to_json(const ExperimentReport& r) {
  Json j;
  j["schema"] = "fewnomial-lab/report/1";
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["passed"] = r.passed();
  Json rows = Json::array();
  for (const ReportRow& row : r.rows) {
    Json o;
    o["label"] = row.label;
    o["inputs"] = row.inputs;
    o["estimate"] = row.estimate;
    o["std_error"] = row.std_error;
    o["samples"] = row.samples;
    o["certified_fraction"] = row.certified_fraction;
    o["degenerate_fraction"] = row.degenerate_fraction;
    if (row.bounds) o["bounds"] = bounds_json(*row.bounds);
    Json values = Json::object();
    for (const auto& [k, v] : row.values) values[k] = v;
    o["values"] = values;
    Json verdicts = Json::array();
    for (const Verdict& v : row.verdicts) verdicts.push_back(verdict_json(v));
    o["verdicts"] = verdicts;
    o["passed"] = row.passed();
    rows.push_back(o);
  }
  j["rows"] = rows;
  Json verdicts = Json::array();
  for (const Verdict& v : r.verdicts) verdicts.push_back(verdict_json(v));
  j["verdicts"] = verdicts;
  return j;
}

std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "# fewnomial-lab report csv v1\n"
      << "# one row per configuration; values and verdicts are ';'-separated "
         "name=value lists; the final row labelled '*' carries the "
         "experiment-level verdicts\n";
  out << "experiment,label,samples,estimate,std_error,certified_fraction,"
         "degenerate_fraction,thm_mixed,prop_unmixed,betc_unmixed,jindal,"
         "kushnirenko_ref,lower_bound_ref,conjecture_reference_scale,values,"
         "verdicts,passed,wall_time\n";
  auto verdict_list = [](const std::vector<Verdict>& vs) {
    std::string s;
    for (const Verdict& v : vs) {
      if (!s.empty()) s += ';';
      s += v.name + "=" + (v.pass ? "pass" : "fail");
    }
    return s;
  };
  for (const ReportRow& row : r.rows) {
    std::string values;
    for (const auto& [k, v] : row.values) {
      if (!values.empty()) values += ';';
      values += k + "=" + num(v);
    }
    const BoundReport* b = row.bounds ? &*row.bounds : nullptr;
    out << field(r.experiment) << ',' << field(row.label) << ',' << row.samples << ','
        << num(row.estimate) << ',' << num(row.std_error) << ','
        << num(row.certified_fraction) << ',' << num(row.degenerate_fraction) << ','
        << (b ? num(b->thm_mixed) : "") << ',' << (b ? opt_num(b->prop_unmixed) : "") << ','
        << (b ? opt_num(b->betc_unmixed) : "") << ',' << (b ? opt_num(b->jindal) : "") << ','
        << (b ? num(b->kushnirenko_ref) : "") << ','
        << (b ? opt_num(b->lower_bound_ref) : "") << ','
        << (b ? num(b->conjecture_reference_scale) : "") << ',' << field(values) << ','
        << field(verdict_list(row.verdicts)) << ',' << (row.passed() ? "true" : "false")
        << ',' << num(row.wall_time) << '\n';
  }
  if (!r.verdicts.empty()) {
    const bool ok = std::all_of(r.verdicts.begin(), r.verdicts.end(),
                                [](const Verdict& v) { return v.pass; });
    out << field(r.experiment) << ",*,,,,,,,,,,,,,," << field(verdict_list(r.verdicts))
        << ',' << (ok ? "true" : "false") << ",\n";
  }
  return out.str();
}

void write_report(const ExperimentReport& r, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("cannot create output_dir '" + cfg.output_dir + "'");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  };
  write("report.json", report_to_json(r).dump(2) + "\n");
  write("report.csv", report_to_csv(r));
  if (cfg.plots)
    for (const Plot& p : r.plots) write(p.file, render_svg(p));
}

}  // namespace fewlab
