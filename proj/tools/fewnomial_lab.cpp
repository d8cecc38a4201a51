#include "fewlab/experiments.hpp"
#include "fewlab/fewnomial.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace fewlab;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("FEWNOMIAL_LAB_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || s[0] == '-') throw ConfigError("FEWNOMIAL_LAB_SEED is not a nonnegative integer");
  return v;
}

int run(const std::string& config_path, std::optional<std::uint64_t> seed,
        std::optional<int> workers, std::optional<std::string> out) {
  ExperimentConfig cfg = ExperimentConfig::from_json(read_json(config_path), env_seed());
  if (seed) cfg.seed = *seed;
  if (workers) {
    if (*workers < 1) throw ConfigError("workers must be at least 1");
    cfg.workers = *workers;
  }
  if (out) cfg.output_dir = *out;

  const ExperimentReport r = run_experiment(cfg);
  write_report(r, cfg);
  for (const ReportRow& row : r.rows) {
    std::cout << (row.passed() ? "pass " : "FAIL ") << row.label;
    for (const Verdict& v : row.verdicts)
      if (!v.pass) std::cout << "  [" << v.name << ": " << v.detail << "]";
    std::cout << "\n";
  }
  for (const Verdict& v : r.verdicts)
    std::cout << (v.pass ? "pass " : "FAIL ") << v.name << "  (" << v.detail << ")\n";
  std::cout << (r.passed() ? "PASS " : "FAIL ") << cfg.experiment << " -> " << cfg.output_dir
            << "\n";
  return r.passed() ? 0 : kExitFailed;
}

int replay(const std::string& path, bool json_only) {
  const Json j = read_json(path);
  if (!j.is_object() || !j.contains("supports"))
    throw ConfigError("system file needs 'supports'");
  std::vector<Support> supports;
  if (!j.at("supports").is_array()) throw ConfigError("'supports' must be a list");
  for (const Json& s : j.at("supports")) supports.push_back(support_from_json(s));

  FewnomialSystem sys;
  try {
    if (j.contains("coeffs")) {
      std::vector<VectorXd> coeffs;
      for (const Json& c : j.at("coeffs")) {
        const auto v = c.get<std::vector<double>>();
        coeffs.push_back(Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
      sys = FewnomialSystem::make(supports, coeffs);
    } else if (j.contains("seed")) {
      sys = sample_gaussian(supports, j.at("seed").get<std::uint64_t>());
    } else {
      throw ConfigError("system file needs 'coeffs' or 'seed'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad system file: ") + e.what());
  }
  if (sys.dim() > 3) throw ConfigError("zero counting supports n <= 3 only");

  CountOptions opts;
  if (j.contains("radius")) opts.fixed_radius = j.at("radius").get<double>();
  const CountResult r = count_zeros(sys, opts);

  Json o;
  o["count"] = r.count;
  o["certified"] = r.certified;
  o["discarded_degenerate"] = r.discarded_degenerate;
  o["radius"] = r.radius;
  o["boxes"] = r.boxes;
  Json coeffs = Json::array();
  for (const VectorXd& c : sys.coeffs) coeffs.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  o["coeffs"] = coeffs;
  Json zeros = Json::array();
  for (const VectorXd& z : r.zeros) {
    Json e;
    e["w"] = std::vector<double>(z.data(), z.data() + z.size());
    const MatrixXd J = jacobian_scaled(sys, z);
    double residual = 0.0;
    for (const ScaledValue& v : eval_scaled(sys, z)) residual = std::max(residual, std::abs(v.mantissa));
    e["scaled_residual"] = residual;
    e["scaled_jacobian_det"] = J.determinant();
    zeros.push_back(e);
  }
  o["zeros"] = zeros;
  std::cout << o.dump(json_only ? -1 : 2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random fewnomial systems: zero counts, bounds and identity checks"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  run_cmd->add_option("--config", config, "experiment config (JSON)")->required();
  run_cmd->add_option("--seed", seed, "master seed (overrides the config)");
  run_cmd->add_option("--workers", workers, "worker threads (overrides the config)");
  run_cmd->add_option("--out", out, "output directory (overrides the config)");

  auto* list_cmd = app.add_subcommand("list-experiments", "list the experiment catalog");

  auto* replay_cmd = app.add_subcommand("replay", "count the zeros of one system");
  std::string system;
  bool compact = false;
  replay_cmd->add_option("--system", system, "system file (JSON)")->required();
  replay_cmd->add_flag("--compact", compact, "single-line JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return run(config, seed, workers, out);
    if (*list_cmd) {
      for (const std::string& name : experiment_names())
        std::cout << name << "  " << experiment_description(name) << "\n";
      return 0;
    }
    if (*replay_cmd) return replay(system, compact);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
