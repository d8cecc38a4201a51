#pragma once

#include "fewlab/bounds.hpp"
#include "fewlab/counting.hpp"
#include "fewlab/geometry.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fewlab {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  std::string experiment;
  Json supports;  // explicit list or generator spec; null for the default
  Json params = Json::object();
  long samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output_dir = ".";
  bool plots = false;

  /// Throws ConfigError on unknown names, missing or ill-typed fields and
  /// samples < 1. Missing seed falls back to `fallback_seed`, then 0.
  static ExperimentConfig from_json(const Json& j,
                                    std::optional<std::uint64_t> fallback_seed = {});
};

struct Verdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

/// One configuration of an experiment.
struct ReportRow {
  std::string label;
  Json inputs = Json::object();
  double estimate = 0.0;
  double std_error = 0.0;
  long samples = 0;
  double certified_fraction = 1.0;
  double degenerate_fraction = 0.0;
  std::optional<BoundReport> bounds;
  std::vector<std::pair<std::string, double>> values;
  std::vector<Verdict> verdicts;
  double wall_time = 0.0;  // seconds; never written to report.json

  bool passed() const;
  /// Named value, or NaN.
  double value(const std::string& name) const;
};

struct PlotSeries {
  std::string name;
  std::vector<double> x, y, err;  // err empty: no error bars
  bool line = true;
};

struct Plot {
  std::string file;  // basename, e.g. "estimates.svg"
  std::string title, xlabel, ylabel;
  bool log_x = false;
  std::vector<PlotSeries> series;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  long samples = 0;
  std::vector<ReportRow> rows;
  std::vector<Verdict> verdicts;  // claims about the rows taken together
  std::vector<Plot> plots;

  bool passed() const;
};

/// Names in catalog order.
const std::vector<std::string>& experiment_names();
std::string experiment_description(const std::string& name);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Monte Carlo zero counting shared by the experiments.

struct SampleOutcome {
  int count = 0;
  bool certified = true;
  bool degenerate = false;
  double max_zero_norm = 0.0;
};

struct CountingSummary {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
  long used = 0;  // samples not discarded as degenerate
  double certified_fraction = 1.0;
  double degenerate_fraction = 0.0;
  std::vector<SampleOutcome> outcomes;  // in sample order
};

/// Counts zeros of `samples` Gaussian systems on the given supports. Sample k
/// uses derive_seed(seed, stream, k). Degenerate samples are left out of the
/// mean.
CountingSummary monte_carlo_count(const std::vector<Support>& supports,
                                  long samples, std::uint64_t seed,
                                  const std::string& stream, int workers,
                                  const CountOptions& opts = {});

// Support generators.

/// Distinct random integer points in [lo, hi]^n.
Support random_integer_support(int n, int t, int lo, int hi, std::uint64_t seed);

/// Cartesian product S_1 x ... x S_n of univariate supports.
Support product_support(const std::vector<std::vector<double>>& factors);

struct Configuration {
  std::string label;
  std::vector<Support> supports;
  double stretch = 1.0;
  std::vector<std::vector<double>> factors;  // product supports only
};

/// Expands an explicit support list or generator spec into configurations.
/// Random generators draw from derive_seed(seed, "supports", index).
std::vector<Configuration> expand_supports(const Json& spec, std::uint64_t seed);

Json support_to_json(const Support& s);
Support support_from_json(const Json& j);

// Reports on disk.

Json report_to_json(const ExperimentReport& r);
std::string report_to_csv(const ExperimentReport& r);

/// Writes report.json, report.csv and, if requested, the SVG plots into
/// cfg.output_dir (created if missing). Throws ConfigError when the
/// directory cannot be written.
void write_report(const ExperimentReport& r, const ExperimentConfig& cfg);

std::string render_svg(const Plot& p);

}  // namespace fewlab
