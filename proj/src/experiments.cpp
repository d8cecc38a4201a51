#include "fewlab/experiments.hpp"

#include "fewlab/bounds.hpp"
#include "fewlab/cones.hpp"
#include "fewlab/kinematic.hpp"
#include "fewlab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace fewlab {

// ---------------------------------------------------------------------------
// Monte Carlo counting

CountingSummary monte_carlo_count(const std::vector<Support>& supports,
                                  long samples, std::uint64_t seed,
                                  const std::string& stream, int workers,
                                  const CountOptions& opts) {
  const SystemGeometry geo = SystemGeometry::of(supports);
  std::vector<VectorXd> zero;
  for (const Support& s : supports) zero.push_back(VectorXd::Zero(s.size()));
  const FewnomialSystem tmpl = FewnomialSystem::make(supports, zero);

  // Fixed chunks so that each task copies the system once.
  constexpr long kChunk = 64;
  const long chunks = (samples + kChunk - 1) / kChunk;
  const auto parts = parallel_map<std::vector<SampleOutcome>>(
      chunks, workers, [&](long c) {
        FewnomialSystem sys = tmpl;
        std::vector<SampleOutcome> out;
        for (long k = c * kChunk; k < std::min(samples, (c + 1) * kChunk); ++k) {
          resample_gaussian(sys, derive_seed(seed, stream, static_cast<std::uint64_t>(k)));
          const CountResult r = count_zeros(sys, opts, &geo);
          out.push_back({r.count, r.certified, r.discarded_degenerate, r.max_zero_norm});
        }
        return out;
      });

  CountingSummary s;
  s.samples = samples;
  s.outcomes.reserve(static_cast<std::size_t>(samples));
  for (const auto& p : parts) s.outcomes.insert(s.outcomes.end(), p.begin(), p.end());
  double sum = 0.0, sq = 0.0;
  long certified = 0, degenerate = 0;
  for (const SampleOutcome& o : s.outcomes) {
    certified += o.certified;
    if (o.degenerate) {
      ++degenerate;
      continue;
    }
    ++s.used;
    sum += o.count;
    sq += static_cast<double>(o.count) * o.count;
  }
  if (s.used > 0) {
    s.mean = sum / static_cast<double>(s.used);
    const double var =
        s.used > 1 ? std::max(0.0, (sq - sum * s.mean) / static_cast<double>(s.used - 1)) : 0.0;
    s.std_error = std::sqrt(var / static_cast<double>(s.used));
  }
  s.certified_fraction = static_cast<double>(certified) / static_cast<double>(samples);
  s.degenerate_fraction = static_cast<double>(degenerate) / static_cast<double>(samples);
  return s;
}

// ---------------------------------------------------------------------------
// Supports

Support random_integer_support(int n, int t, int lo, int hi, std::uint64_t seed) {
  const double cells = std::pow(static_cast<double>(hi - lo + 1), n);
  if (t < 1 || n < 1 || hi < lo || static_cast<double>(t) > cells)
    throw ConfigError("random support: cannot place " + std::to_string(t) +
                      " distinct points in the box");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(lo, hi);
  std::set<std::vector<int>> seen;
  MatrixXd m(n, t);
  int k = 0;
  while (k < t) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int& x : p) x = coord(rng);
    if (!seen.insert(p).second) continue;
    for (int j = 0; j < n; ++j) m(j, k) = p[static_cast<std::size_t>(j)];
    ++k;
  }
  return Support(m);
}

Support product_support(const std::vector<std::vector<double>>& factors) {
  const int n = static_cast<int>(factors.size());
  long t = 1;
  for (const auto& f : factors) t *= static_cast<long>(f.size());
  MatrixXd m(n, t);
  for (long k = 0; k < t; ++k) {
    long rest = k;
    for (int j = n - 1; j >= 0; --j) {
      const auto& f = factors[static_cast<std::size_t>(j)];
      m(j, k) = f[static_cast<std::size_t>(rest % static_cast<long>(f.size()))];
      rest /= static_cast<long>(f.size());
    }
  }
  return Support(m);
}

Json support_to_json(const Support& s) {
  Json pts = Json::array();
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s.dim() == 1) {
      pts.push_back(s.points()(0, k));
    } else {
      Json p = Json::array();
      for (Eigen::Index j = 0; j < s.dim(); ++j) p.push_back(s.points()(j, k));
      pts.push_back(p);
    }
  }
  return pts;
}

Support support_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("a support is a nonempty list of points");
  const bool scalar = j.front().is_number();
  const auto n = static_cast<Eigen::Index>(scalar ? 1 : j.front().size());
  if (n == 0) throw ConfigError("support points must not be empty");
  MatrixXd m(n, static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    const Json& p = j[k];
    if (scalar) {
      if (!p.is_number()) throw ConfigError("support points must all have the same shape");
      m(0, static_cast<Eigen::Index>(k)) = p.get<double>();
      continue;
    }
    if (!p.is_array() || static_cast<Eigen::Index>(p.size()) != n)
      throw ConfigError("support points must all have the same length");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!p[static_cast<std::size_t>(i)].is_number())
        throw ConfigError("support coordinates must be numbers");
      m(i, static_cast<Eigen::Index>(k)) = p[static_cast<std::size_t>(i)].get<double>();
    }
  }
  try {
    return Support(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid support: ") + e.what());
  }
}

namespace {

std::vector<Support> system_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("a configuration is a nonempty list of supports");
  std::vector<Support> out;
  for (const Json& s : j) out.push_back(support_from_json(s));
  const Eigen::Index n = out.front().dim();
  for (const Support& s : out)
    if (s.dim() != n) throw ConfigError("supports of one configuration differ in dimension");
  if (static_cast<Eigen::Index>(out.size()) != n)
    throw ConfigError("a configuration needs n supports in R^n");
  return out;
}

Json system_to_json(const std::vector<Support>& sup) {
  Json j = Json::array();
  for (const Support& s : sup) j.push_back(support_to_json(s));
  return j;
}

std::vector<int> int_list(const Json& j, const char* what) {
  std::vector<int> out;
  if (j.is_number_integer()) return {j.get<int>()};
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an integer or a list");
  for (const Json& x : j) {
    if (!x.is_number_integer()) throw ConfigError(std::string(what) + " must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

std::vector<Configuration> random_configs(const Json& spec, std::uint64_t seed) {
  const int n = get_or(spec, "n", 2);
  int tmin = 2, tmax = 5;
  if (spec.contains("t")) {
    const Json& t = spec.at("t");
    if (t.is_number_integer()) {
      tmin = tmax = t.get<int>();
    } else if (t.is_object()) {
      tmin = get_or(t, "min", tmin);
      tmax = get_or(t, "max", tmax);
    } else {
      throw ConfigError("field 't' must be an integer or {min, max}");
    }
  }
  auto box = get_or<std::vector<int>>(spec, "box", {0, 6});
  if (box.size() != 2) throw ConfigError("field 'box' must be [lo, hi]");
  const bool sweep = get_or(spec, "sweep_t", false);
  const bool unmixed = get_or(spec, "unmixed", false);
  const int count = sweep ? tmax - tmin + 1 : get_or(spec, "count", 10);
  if (n < 1 || tmin < 1 || tmax < tmin || count < 1)
    throw ConfigError("random generator: need n >= 1, 1 <= t.min <= t.max, count >= 1");

  std::vector<Configuration> out;
  for (int k = 0; k < count; ++k) {
    const std::string stream = "supports/" + std::to_string(k);
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt == 1000) throw ConfigError("random generator: no full-dimensional configuration");
      std::mt19937_64 rng(derive_seed(seed, stream, attempt));
      std::uniform_int_distribution<int> tdist(tmin, tmax);
      Configuration c;
      std::vector<int> ts;
      for (int i = 0; i < n; ++i) {
        const int t = sweep ? tmin + k : tdist(rng);
        if (unmixed && i > 0) {
          c.supports.push_back(c.supports.front());
        } else {
          c.supports.push_back(random_integer_support(n, t, box[0], box[1], rng()));
        }
        ts.push_back(static_cast<int>(c.supports.back().size()));
      }
      if (!SystemGeometry::of(c.supports).full_dimensional) continue;
      c.label = "random " + std::to_string(k) + " t=";
      for (std::size_t i = 0; i < ts.size(); ++i)
        c.label += (i ? "/" : "") + std::to_string(ts[i]);
      out.push_back(std::move(c));
      break;
    }
  }
  return out;
}

std::string fmt_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::vector<Configuration> expand_supports(const Json& spec, std::uint64_t seed) {
  if (spec.is_array()) return {{"explicit", system_from_json(spec), 1.0, {}}};
  if (!spec.is_object() || !spec.contains("generator"))
    throw ConfigError("supports must be a list of supports or a generator object");
  const std::string gen = get_or<std::string>(spec, "generator", "");
  std::vector<Configuration> out;
  if (gen == "explicit") {
    if (!spec.contains("configs") || !spec.at("configs").is_array())
      throw ConfigError("explicit generator needs 'configs'");
    int k = 0;
    for (const Json& c : spec.at("configs"))
      out.push_back({"config " + std::to_string(k++), system_from_json(c), 1.0, {}});
  } else if (gen == "decoupled") {
    for (int n : int_list(spec.contains("n") ? spec.at("n") : Json(2), "n")) {
      if (n < 1 || n > 3) throw ConfigError("decoupled generator: n must be 1, 2 or 3");
      Configuration c;
      c.label = "n=" + std::to_string(n);
      for (int i = 0; i < n; ++i) {
        MatrixXd m = MatrixXd::Zero(n, 2);
        m(i, 1) = 1.0;
        c.supports.emplace_back(m);
      }
      out.push_back(std::move(c));
    }
  } else if (gen == "random") {
    out = random_configs(spec, seed);
  } else if (gen == "product") {
    const auto factors = get_or<std::vector<std::vector<double>>>(spec, "factors", {});
    if (factors.empty() || factors.size() > 3)
      throw ConfigError("product generator needs 1 to 3 factors");
    for (const auto& f : factors)
      if (f.empty()) throw ConfigError("product factors must be nonempty");
    Configuration c;
    const Support a = product_support(factors);
    c.supports.assign(factors.size(), a);
    c.factors = factors;
    c.label = "product";
    for (const auto& f : factors) {
      std::string s;
      for (double x : f) s += (s.empty() ? "" : ",") + fmt_number(x);
      c.label += " {" + s + "}";
    }
    out.push_back(std::move(c));
  } else if (gen == "stretched") {
    if (!spec.contains("base")) throw ConfigError("stretched generator needs 'base'");
    const std::vector<Support> base = system_from_json(spec.at("base"));
    const auto mult = get_or<std::vector<double>>(spec, "multipliers", {1, 2, 4, 8});
    for (double m : mult) {
      if (!(m > 0)) throw ConfigError("stretch multipliers must be positive");
      Configuration c;
      c.stretch = m;
      c.label = "m=" + fmt_number(m);
      for (const Support& s : base) c.supports.emplace_back(MatrixXd(m * s.points()));
      out.push_back(std::move(c));
    }
  } else {
    throw ConfigError("unknown support generator '" + gen + "'");
  }
  for (const Configuration& c : out)
    if (c.supports.front().dim() > 3)
      throw ConfigError("zero counting supports n <= 3 only");
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Verdict verdict(std::string name, bool pass, std::string detail) {
  return {std::move(name), pass, std::move(detail)};
}

std::string show(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

BoundReport bounds_for(const std::vector<Support>& sup, const SystemGeometry& geo,
                       bool product = false) {
  BoundInputs in;
  in.n = static_cast<int>(sup.front().dim());
  for (const Support& s : sup) in.t.push_back(static_cast<int>(s.size()));
  in.V0 = static_cast<int>(geo.decomposition.size());
  in.unmixed = std::all_of(sup.begin(), sup.end(), [&](const Support& s) {
    return s.points().cols() == sup.front().points().cols() && s.points() == sup.front().points();
  });
  in.product = product;
  return bound_report(in);
}

// Fills the counting fields of a row and its degeneracy verdict.
ReportRow counting_row(const Configuration& c, const CountingSummary& s) {
  ReportRow row;
  row.label = c.label;
  row.inputs["supports"] = system_to_json(c.supports);
  row.estimate = s.mean;
  row.std_error = s.std_error;
  row.samples = s.samples;
  row.certified_fraction = s.certified_fraction;
  row.degenerate_fraction = s.degenerate_fraction;
  row.verdicts.push_back(verdict("degenerate_fraction", s.degenerate_fraction <= 1e-3,
                                 show(s.degenerate_fraction) + " <= 0.001"));
  return row;
}

Verdict bound_verdict(const std::string& name, double est, double se, double bound) {
  return verdict(name, est <= bound + 3.0 * se,
                 show(est) + " <= " + show(bound) + " + 3*" + show(se));
}

std::vector<Configuration> configs_or(const ExperimentConfig& cfg, const char* fallback) {
  return expand_supports(cfg.supports.is_null() ? Json::parse(fallback) : cfg.supports,
                         cfg.seed);
}

std::string stream_name(const ExperimentConfig& cfg, const Configuration& c) {
  return cfg.experiment + "/" + c.label;
}

KinematicOptions kinematic_options(const ExperimentConfig& cfg) {
  KinematicOptions o;
  o.lambda_samples = get_or(cfg.params, "lambda_samples", o.lambda_samples);
  o.cubature.max_cells = get_or(cfg.params, "max_cells", o.cubature.max_cells);
  return o;
}

Plot estimate_plot(const ExperimentReport& r, const std::string& xlabel,
                   const std::vector<double>& x,
                   const std::vector<std::pair<std::string, std::vector<double>>>& refs) {
  Plot p;
  p.xlabel = xlabel;
  p.ylabel = "expected number of zeros";
  PlotSeries est{"counting (3 se)", x, {}, {}, false};
  for (const ReportRow& row : r.rows) {
    est.y.push_back(row.estimate);
    est.err.push_back(3.0 * row.std_error);
  }
  p.series.push_back(est);
  for (const auto& [name, y] : refs) p.series.push_back({name, x, y, {}, true});
  return p;
}

ExperimentReport example_2n(const ExperimentConfig& cfg) {
  ExperimentReport r;
  std::vector<double> xs, expect, bound;
  for (const Configuration& c : configs_or(cfg, R"({"generator":"decoupled","n":[1,2,3]})")) {
    const auto t0 = Clock::now();
    const int n = static_cast<int>(c.supports.size());
    const CountingSummary s =
        monte_carlo_count(c.supports, cfg.samples, cfg.seed, stream_name(cfg, c), cfg.workers);
    ReportRow row = counting_row(c, s);
    const SystemGeometry geo = SystemGeometry::of(c.supports);
    row.bounds = bounds_for(c.supports, geo);
    const double p = std::pow(0.5, n);
    const double bse = std::sqrt(p * (1 - p) / static_cast<double>(std::max(1L, s.used)));
    row.values = {{"expected", p}, {"binomial_se", bse}};
    row.verdicts.push_back(verdict("matches_2^-n", std::abs(s.mean - p) <= 3.0 * bse,
                                   "|" + show(s.mean) + " - " + show(p) + "| <= 3*" + show(bse)));
    row.verdicts.push_back(bound_verdict("thm_mixed", s.mean, s.std_error, row.bounds->thm_mixed));
    row.wall_time = seconds_since(t0);
    xs.push_back(n);
    expect.push_back(p);
    bound.push_back(row.bounds->thm_mixed);
    r.rows.push_back(std::move(row));
  }
  r.plots.push_back(estimate_plot(r, "n", xs, {{"2^-n", expect}, {"mixed bound", bound}}));
  return r;
}

// Univariate rows: counting, the EK integral and the Jindal bound.
ReportRow univariate_row(const ExperimentConfig& cfg, const Configuration& c,
                         bool kinematic) {
  const auto t0 = Clock::now();
  const Support& s = c.supports.front();
  const CountingSummary cs =
      monte_carlo_count(c.supports, cfg.samples, cfg.seed, stream_name(cfg, c), cfg.workers);
  ReportRow row = counting_row(c, cs);
  row.bounds = bounds_for(c.supports, SystemGeometry::of(c.supports));
  const double ek = ek_expected_univariate(s);
  const double jindal = *row.bounds->jindal;
  row.values = {{"t", static_cast<double>(s.size())}, {"ek", ek}};
  row.verdicts.push_back(verdict("counting_matches_ek", std::abs(cs.mean - ek) <= 3.0 * cs.std_error,
                                 "|" + show(cs.mean) + " - " + show(ek) + "| <= 3*" + show(cs.std_error)));
  row.verdicts.push_back(bound_verdict("jindal", cs.mean, cs.std_error, jindal));
  row.verdicts.push_back(verdict("ek_below_jindal", ek <= jindal, show(ek) + " <= " + show(jindal)));
  if (kinematic) {
    const double tol = get_or(cfg.params, "kinematic_tol", 1e-2);
    const KinematicEstimate k = expected_zeros_kinematic(
        c.supports, kinematic_options(cfg), derive_seed(cfg.seed, "kinematic/" + c.label, 0));
    row.values.emplace_back("kinematic", k.estimate);
    row.values.emplace_back("kinematic_error", k.combined_error);
    row.verdicts.push_back(verdict("kinematic_matches_ek", std::abs(k.estimate - ek) <= tol,
                                   "|" + show(k.estimate) + " - " + show(ek) + "| <= " + show(tol)));
  }
  row.wall_time = seconds_since(t0);
  return row;
}

ExperimentReport jindal_sweep(const ExperimentConfig& cfg) {
  ExperimentReport r;
  std::vector<double> xs, ek, jb;
  for (const Configuration& c : configs_or(
           cfg, R"({"generator":"random","n":1,"t":{"min":2,"max":20},"sweep_t":true,"box":[0,40]})")) {
    ReportRow row = univariate_row(cfg, c, false);
    xs.push_back(row.value("t"));
    ek.push_back(row.value("ek"));
    jb.push_back(*row.bounds->jindal);
    r.rows.push_back(std::move(row));
  }
  r.plots.push_back(estimate_plot(r, "t", xs, {{"EK integral", ek}, {"(2/pi) sqrt(t-1)", jb}}));
  return r;
}

ExperimentReport ek_vs_counting(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const bool kin = get_or(cfg.params, "kinematic", true);
  std::vector<double> xs, ek;
  int k = 0;
  for (const Configuration& c : configs_or(
           cfg, R"({"generator":"random","n":1,"t":{"min":2,"max":10},"count":20,"box":[0,30]})")) {
    ReportRow row = univariate_row(cfg, c, kin);
    xs.push_back(k++);
    ek.push_back(row.value("ek"));
    r.rows.push_back(std::move(row));
  }
  r.plots.push_back(estimate_plot(r, "configuration", xs, {{"EK integral", ek}}));
  return r;
}

ExperimentReport mixed_bound_sweep(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int kin_configs = get_or(cfg.params, "kinematic_configs", 0);
  std::vector<double> xs, bound, kin;
  int k = 0;
  for (const Configuration& c : configs_or(
           cfg, R"({"generator":"random","n":2,"t":{"min":2,"max":5},"count":30,"box":[0,6]})")) {
    const auto t0 = Clock::now();
    const CountingSummary s =
        monte_carlo_count(c.supports, cfg.samples, cfg.seed, stream_name(cfg, c), cfg.workers);
    ReportRow row = counting_row(c, s);
    const SystemGeometry geo = SystemGeometry::of(c.supports);
    row.bounds = bounds_for(c.supports, geo);
    row.values.emplace_back("V0", row.bounds->inputs.V0);
    row.verdicts.push_back(bound_verdict("thm_mixed", s.mean, s.std_error, row.bounds->thm_mixed));
    double kv = std::numeric_limits<double>::quiet_NaN();
    if (k < kin_configs) {
      const KinematicEstimate e = expected_zeros_kinematic(
          c.supports, kinematic_options(cfg), derive_seed(cfg.seed, "kinematic/" + c.label, 0));
      const double comb = std::hypot(s.std_error, e.combined_error);
      kv = e.estimate;
      row.values.emplace_back("kinematic", e.estimate);
      row.values.emplace_back("kinematic_error", e.combined_error);
      row.values.emplace_back("combined_error", comb);
      row.verdicts.push_back(verdict("kinematic_agrees", std::abs(e.estimate - s.mean) <= 3.0 * comb,
                                     "|" + show(e.estimate) + " - " + show(s.mean) + "| <= 3*" + show(comb)));
    }
    row.wall_time = seconds_since(t0);
    xs.push_back(k++);
    bound.push_back(row.bounds->thm_mixed);
    kin.push_back(kv);
    r.rows.push_back(std::move(row));
  }
  std::vector<std::pair<std::string, std::vector<double>>> refs = {{"mixed bound", bound}};
  if (kin_configs > 0) refs.emplace_back("kinematic", kin);
  r.plots.push_back(estimate_plot(r, "configuration", xs, refs));
  return r;
}

ExperimentReport mvr_product(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const bool kin = get_or(cfg.params, "kinematic", true);
  for (const Configuration& c :
       configs_or(cfg, R"({"generator":"product","factors":[[0,1,3],[0,1,3]]})")) {
    if (c.factors.empty()) throw ConfigError("mvr-product needs product supports");
    const auto t0 = Clock::now();
    const CountingSummary s =
        monte_carlo_count(c.supports, cfg.samples, cfg.seed, stream_name(cfg, c), cfg.workers);
    ReportRow row = counting_row(c, s);
    row.bounds = bounds_for(c.supports, SystemGeometry::of(c.supports), true);
    std::vector<double> es;
    for (const auto& f : c.factors) {
      MatrixXd m(1, static_cast<Eigen::Index>(f.size()));
      for (std::size_t i = 0; i < f.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = f[i];
      es.push_back(ek_expected_univariate(Support(m)));
    }
    const double identity = mvr_product_identity(es);
    for (std::size_t i = 0; i < es.size(); ++i)
      row.values.emplace_back("ek_factor_" + std::to_string(i + 1), es[i]);
    row.values.emplace_back("product_identity", identity);
    // The EK integrals are accurate to quadrature precision, so the counting
    // error dominates the combined error.
    row.verdicts.push_back(verdict("identity_matches_counting",
                                   std::abs(s.mean - identity) <= 3.0 * s.std_error,
                                   "|" + show(s.mean) + " - " + show(identity) + "| <= 3*" + show(s.std_error)));
    row.verdicts.push_back(bound_verdict("thm_mixed", s.mean, s.std_error, row.bounds->thm_mixed));
    if (kin && c.supports.size() <= 3) {
      const KinematicEstimate e = expected_zeros_kinematic(
          c.supports, kinematic_options(cfg), derive_seed(cfg.seed, "kinematic/" + c.label, 0));
      row.values.emplace_back("kinematic", e.estimate);
      row.values.emplace_back("kinematic_error", e.combined_error);
      row.verdicts.push_back(verdict("identity_matches_kinematic",
                                     std::abs(e.estimate - identity) <= 3.0 * e.combined_error,
                                     "|" + show(e.estimate) + " - " + show(identity) + "| <= 3*" +
                                         show(e.combined_error)));
    }
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  return r;
}

ExperimentReport unmixed_compare(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Json cases = cfg.params.contains("cases") ? cfg.params.at("cases")
                                             : Json::parse("[[2,4],[3,5],[4,6],[5,7],[6,8]]");
  const int box = get_or(cfg.params, "box", 4);
  const int count_max_n = get_or(cfg.params, "count_max_n", 2);
  std::vector<double> xs, prop, betc;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto nt = int_list(cases[k], "cases");
    if (nt.size() != 2 || nt[0] < 1 || nt[1] <= nt[0])
      throw ConfigError("each case is [n, t] with t > n >= 1");
    const int n = nt[0], t = nt[1];
    const auto t0 = Clock::now();
    Support a;
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt == 1000) throw ConfigError("unmixed-compare: no full-dimensional support");
      a = random_integer_support(n, t, 0, box,
                                 derive_seed(cfg.seed, "unmixed/" + std::to_string(k), attempt));
      if (affine_dimension(a.points()) == n) break;
    }
    Configuration c{"n=" + std::to_string(n) + " t=" + std::to_string(t),
                    std::vector<Support>(static_cast<std::size_t>(n), a), 1.0, {}};
    BoundInputs in;
    in.n = n;
    in.t.assign(static_cast<std::size_t>(n), t);
    in.V0 = static_cast<int>(hull_vertices(a).num_vertices());
    in.unmixed = true;
    ReportRow row;
    if (n <= count_max_n) {
      row = counting_row(c, monte_carlo_count(c.supports, cfg.samples, cfg.seed,
                                              stream_name(cfg, c), cfg.workers));
    } else {
      row.label = c.label;
      row.inputs["supports"] = system_to_json(c.supports);
      row.estimate = row.std_error = std::numeric_limits<double>::quiet_NaN();
    }
    row.bounds = bound_report(in);
    const double p = *row.bounds->prop_unmixed, b = *row.bounds->betc_unmixed;
    row.values = {{"n", n}, {"t", t}, {"V0", in.V0}, {"prop_over_betc", p / b},
                  {"prop_exceeds_betc", p > b ? 1.0 : 0.0}};
    if (n <= count_max_n) {
      row.verdicts.push_back(bound_verdict("prop_unmixed", row.estimate, row.std_error, p));
      row.verdicts.push_back(bound_verdict("betc_unmixed", row.estimate, row.std_error, b));
    }
    row.wall_time = seconds_since(t0);
    xs.push_back(n);
    prop.push_back(p);
    betc.push_back(b);
    r.rows.push_back(std::move(row));
  }
  // The remark under test: the vertex-count bound degrades faster in n.
  std::vector<std::pair<int, double>> ratio;
  for (const ReportRow& row : r.rows) ratio.emplace_back(static_cast<int>(row.value("n")), row.value("prop_over_betc"));
  std::sort(ratio.begin(), ratio.end());
  bool grows = true;
  std::string detail;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    detail += (i ? ", " : "") + show(ratio[i].second);
    if (i > 0 && ratio[i].first > ratio[i - 1].first && !(ratio[i].second > ratio[i - 1].second))
      grows = false;
  }
  r.verdicts.push_back(verdict("ratio_grows_with_n", grows, "prop/betc by n: " + detail));
  Plot p;
  p.xlabel = "n";
  p.ylabel = "bound";
  p.series = {{"vertex-count bound", xs, prop, {}, false}, {"2^(1-n) C(t,n)", xs, betc, {}, false}};
  r.plots.push_back(p);
  return r;
}

ExperimentReport concentration(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const double eps = get_or(cfg.params, "epsilon", 0.5);
  std::vector<double> xs, fr, fe;
  for (const Configuration& c : configs_or(
           cfg, R"({"generator":"stretched","base":[[[0,0],[1,0],[0,1]],[[0,0],[2,0],[1,2]]],"multipliers":[1,2,4,8]})")) {
    const auto t0 = Clock::now();
    const CountingSummary s =
        monte_carlo_count(c.supports, cfg.samples, cfg.seed, stream_name(cfg, c), cfg.workers);
    ReportRow row = counting_row(c, s);
    row.bounds = bounds_for(c.supports, SystemGeometry::of(c.supports));
    long far = 0;
    for (const SampleOutcome& o : s.outcomes)
      if (!o.degenerate && o.max_zero_norm > eps) ++far;
    const double used = static_cast<double>(std::max(1L, s.used));
    const double f = static_cast<double>(far) / used;
    const double se = std::sqrt(f * (1 - f) / used);
    row.values = {{"stretch", c.stretch}, {"epsilon", eps}, {"far_fraction", f}, {"far_fraction_se", se}};
    row.verdicts.push_back(bound_verdict("thm_mixed", s.mean, s.std_error, row.bounds->thm_mixed));
    row.wall_time = seconds_since(t0);
    xs.push_back(c.stretch);
    fr.push_back(f);
    fe.push_back(se);
    r.rows.push_back(std::move(row));
  }
  bool monotone = true;
  std::string detail;
  for (std::size_t i = 0; i < fr.size(); ++i) {
    detail += (i ? ", " : "") + show(fr[i]);
    if (i > 0 && fr[i] > fr[i - 1]) monotone = false;
  }
  r.verdicts.push_back(verdict("far_fraction_non_increasing", monotone, "by stretch: " + detail));
  if (fr.size() >= 2)
    r.verdicts.push_back(verdict("far_fraction_halved", fr.back() < 0.5 * fr.front(),
                                 show(fr.back()) + " < 0.5*" + show(fr.front())));
  Plot p;
  p.xlabel = "stretch m";
  p.ylabel = "P(zero with |w| > " + show(eps) + ")";
  p.log_x = true;
  p.series = {{"fraction (3 se)", xs, fr, {}, true}};
  for (double& e : fe) e *= 3.0;
  p.series.front().err = fe;
  r.plots.push_back(p);
  return r;
}

// Random simplicial cone with unit generators, kept away from degeneracy.
ProperCone random_simplicial(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  for (;;) {
    MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    for (Eigen::Index j = 0; j < n; ++j) m.col(j).normalize();
    if (std::abs(m.determinant()) > 0.2) return ProperCone::from_generators(m);
  }
}

ExperimentReport cone_identities(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int cones = get_or(cfg.params, "cones", 50);
  const int max_n = get_or(cfg.params, "max_n", 4);
  const int draws = get_or(cfg.params, "draws", 1000);
  const int pairs = get_or(cfg.params, "pairs", 50);
  const long mc = get_or(cfg.params, "mc_samples", 200000L);
  const long det_samples = get_or(cfg.params, "det_samples", 1000000L);
  auto simple_row = [](std::string label) {
    ReportRow row;
    row.label = std::move(label);
    row.estimate = row.std_error = std::numeric_limits<double>::quiet_NaN();
    return row;
  };

  {  // Characteristic function: exact against rejection sampling.
    const auto t0 = Clock::now();
    ReportRow row = simple_row("char_function exact vs Monte Carlo");
    const auto results = parallel_map<std::pair<double, double>>(cones, cfg.workers, [&](long k) {
      std::mt19937_64 rng(derive_seed(cfg.seed, "cones/char", static_cast<std::uint64_t>(k)));
      const Eigen::Index n = 1 + k % max_n;
      const ProperCone c = random_simplicial(rng, n);
      const ProperCone d = dual_cone(c);
      VectorXd x = VectorXd::Zero(n);
      std::uniform_real_distribution<double> u(0.2, 1.0);
      for (Eigen::Index j = 0; j < n; ++j) x += u(rng) * d.generators.col(j).normalized();
      const double exact = char_function(c, x).value;
      const CharFnValue m = char_function_mc(c, x, mc, rng());
      return std::pair{exact, m.std_error > 0 ? std::abs(exact - m.value) / m.std_error
                                              : (exact == m.value ? 0.0 : 1e300)};
    });
    int within = 0;
    double worst = 0.0;
    for (const auto& [_, z] : results) {
      within += z <= 3.0;
      worst = std::max(worst, z);
    }
    row.samples = mc;
    row.values = {{"cones", cones}, {"within_3se", within}, {"max_z", worst}};
    row.verdicts.push_back(verdict("all_within_3se", within == cones,
                                   std::to_string(within) + "/" + std::to_string(cones)));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  {  // Crucial inequality on random draws from the dual cone.
    const auto t0 = Clock::now();
    ReportRow row = simple_row("crucial inequality on random draws");
    std::mt19937_64 rng(derive_seed(cfg.seed, "cones/crucial", 0));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int holds = 0;
    double worst = 0.0;
    for (int k = 0; k < draws; ++k) {
      const Eigen::Index n = 1 + k % max_n;
      const ProperCone c = random_simplicial(rng, n);
      const MatrixXd dual = dual_cone(c).generators;
      const MatrixXd b = dual * MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
      const CrucialResult res = crucial_inequality(c, b);
      holds += res.holds && res.lhs <= 1.0 + 1e-9;
      worst = std::max(worst, res.lhs);
    }
    row.values = {{"draws", draws}, {"max_lhs", worst}};
    row.verdicts.push_back(verdict("holds", holds == draws,
                                   std::to_string(holds) + "/" + std::to_string(draws)));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  {  // Equality for the orthant with positive multiples of the axes.
    const auto t0 = Clock::now();
    ReportRow row = simple_row("crucial inequality equality on the orthant");
    std::mt19937_64 rng(derive_seed(cfg.seed, "cones/orthant", 0));
    std::uniform_real_distribution<double> u(0.1, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index n = 1 + k % 5;
      VectorXd d(n);
      for (Eigen::Index i = 0; i < n; ++i) d(i) = u(rng);
      const CrucialResult res = crucial_inequality(ProperCone::orthant(n), MatrixXd(d.asDiagonal()));
      worst = std::max(worst, std::abs(res.lhs - 1.0));
    }
    row.values = {{"max_deviation", worst}};
    row.verdicts.push_back(verdict("equality", worst < 1e-9, show(worst) + " < 1e-9"));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  {  // sigma(V, W) = sigma(W, V) = sigma(V-perp, W-perp) = projection det.
    const auto t0 = Clock::now();
    ReportRow row = simple_row("sigma symmetry and projection identities");
    double worst = 0.0;
    for (int k = 0; k < pairs; ++k) {
      const Eigen::Index n = 2 + k % 4;
      const Eigen::Index dim = 1 + (k / 4) % (n - 1);
      const std::uint64_t s = derive_seed(cfg.seed, "cones/sigma", static_cast<std::uint64_t>(k));
      const SubspacePair p = SubspacePair::make(random_orthonormal(n, dim, s),
                                                random_orthonormal(n, n - dim, s + 1));
      const double v = sigma(p);
      worst = std::max({worst, std::abs(v - sigma(SubspacePair::make(p.W, p.V))),
                        std::abs(v - sigma(SubspacePair::make(orthogonal_complement(p.V),
                                                              orthogonal_complement(p.W)))),
                        std::abs(v - projection_det(p))});
    }
    row.values = {{"pairs", pairs}, {"max_deviation", worst}};
    row.verdicts.push_back(verdict("identities", worst < 1e-10, show(worst) + " < 1e-10"));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  for (int n = 1; n <= max_n; ++n) {  // E|det| of Gaussian matrices.
    const auto t0 = Clock::now();
    ReportRow row = simple_row("gaussian |det| moment n=" + std::to_string(n));
    double se = 0.0;
    row.estimate = gaussian_det_moment(n, det_samples, derive_seed(cfg.seed, "cones/det", n), &se);
    row.std_error = se;
    row.samples = det_samples;
    double prod = 1.0;
    for (int k = 1; k <= n; ++k) prod *= rho(k);
    const double closed = std::pow(2.0 * std::numbers::pi, 0.5 * n) / vol_projective(n);
    row.values = {{"rho_product", prod}, {"closed_form", closed}};
    row.verdicts.push_back(verdict("moment_matches", std::abs(row.estimate - prod) <= 3.0 * se,
                                   "|" + show(row.estimate) + " - " + show(prod) + "| <= 3*" + show(se)));
    row.verdicts.push_back(verdict("rho_product_identity", std::abs(prod - closed) < 1e-10,
                                   "|" + show(prod) + " - " + show(closed) + "| < 1e-10"));
    row.verdicts.push_back(verdict(
        "volume_ratio_identity",
        std::abs(vol_projective(n - 1) / vol_projective(n) - rho(n) / std::sqrt(2.0 * std::numbers::pi)) < 1e-10,
        "vol(P^" + std::to_string(n - 1) + ")/vol(P^" + std::to_string(n) + ") = rho/sqrt(2 pi)"));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  {
    const auto t0 = Clock::now();
    ReportRow row = simple_row("Segre map isometry");
    double worst = 0.0;
    for (int m = 1; m <= 4; ++m)
      for (int n = 1; n <= 4; ++n)
        worst = std::max(worst, segre_isometry_check(m, n, 20, derive_seed(cfg.seed, "cones/segre", 8 * m + n)));
    row.values = {{"max_deviation", worst}};
    row.verdicts.push_back(verdict("isometric", worst < 1e-5, show(worst) + " < 1e-5"));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  {
    const auto t0 = Clock::now();
    ReportRow row = simple_row("projected Gaussian second moments");
    bool ok = true;
    double worst = 0.0;
    for (int p : {1, 3, 6})
      for (int m : {1, 4}) {
        const SecondMomentCheck c = projected_gaussian_moments(
            p, m, 100000, derive_seed(cfg.seed, "cones/moments", 10 * p + m));
        ok = ok && c.max_moment <= 1.0 + 3.0 * c.std_error;
        worst = std::max(worst, c.max_moment);
      }
    row.values = {{"max_moment", worst}};
    row.verdicts.push_back(verdict("at_most_one", ok, show(worst) + " <= 1 + 3 se"));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  {
    const auto t0 = Clock::now();
    ReportRow row = simple_row("chart inverse contraction");
    double worst = 0.0;
    for (int m : {1, 2, 5})
      worst = std::max(worst, chart_derivative_norm(m, 500, derive_seed(cfg.seed, "cones/chart", m)));
    row.values = {{"max_norm", worst}};
    row.verdicts.push_back(verdict("contraction", worst <= 1.0 + 1e-8, show(worst) + " <= 1"));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  return r;
}

// Per-sample invariance of zero counts under transformations of the supports.
ExperimentReport invariance(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const std::vector<Configuration> configs = configs_or(
      cfg, R"({"generator":"random","n":2,"t":{"min":2,"max":5},"count":100,"box":[0,6]})");
  struct Transform {
    std::string name;
    std::function<FewnomialSystem(const FewnomialSystem&, std::mt19937_64&)> apply;
  };
  auto random_gl = [](std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> g;
    for (;;) {
      MatrixXd m(n, n);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
      const double cond = m.jacobiSvd().singularValues().maxCoeff() /
                          m.jacobiSvd().singularValues().minCoeff();
      if (cond < 10.0) return m;
    }
  };
  const std::vector<double> factors = {-3.0, -2.0, -1.0, -0.5, 0.5, 2.0, 3.0};
  const std::vector<Transform> transforms = {
      {"translation",
       [](const FewnomialSystem& s, std::mt19937_64& rng) {
         std::uniform_int_distribution<int> d(-5, 5);
         std::vector<VectorXd> b;
         for (Eigen::Index i = 0; i < s.size(); ++i)
           b.push_back(VectorXd::NullaryExpr(s.dim(), [&] { return d(rng); }));
         return translate_support(s, b);
       }},
      {"linear map",
       [&](const FewnomialSystem& s, std::mt19937_64& rng) {
         return gl_transform(s, random_gl(rng, s.dim()));
       }},
      {"common scaling",
       [&](const FewnomialSystem& s, std::mt19937_64& rng) {
         std::uniform_int_distribution<std::size_t> d(0, factors.size() - 1);
         return scale_supports(s, std::vector<double>(static_cast<std::size_t>(s.size()), factors[d(rng)]));
       }},
      {"per-equation scaling",
       [&](const FewnomialSystem& s, std::mt19937_64& rng) {
         std::uniform_int_distribution<std::size_t> d(0, factors.size() - 1);
         std::vector<double> l;
         for (Eigen::Index i = 0; i < s.size(); ++i) l.push_back(factors[d(rng)]);
         return scale_supports(s, l);
       }},
  };

  struct Pair {
    int base = 0, moved = 0;
    bool compared = false;
  };
  const auto base_systems = [&](long k) {
    const Configuration& c = configs[static_cast<std::size_t>(k)];
    return sample_gaussian(c.supports, derive_seed(cfg.seed, "invariance/coeffs", k));
  };
  for (const Transform& tr : transforms) {
    const auto t0 = Clock::now();
    const auto pairs = parallel_map<Pair>(static_cast<long>(configs.size()), cfg.workers, [&](long k) {
      const FewnomialSystem sys = base_systems(k);
      std::mt19937_64 rng(derive_seed(cfg.seed, "invariance/" + tr.name, k));
      const FewnomialSystem moved = tr.apply(sys, rng);
      const CountResult a = count_zeros(sys);
      const CountResult b = count_zeros(moved);
      Pair p{a.count, b.count, a.certified && b.certified};
      return p;
    });
    ReportRow row;
    row.label = tr.name;
    row.samples = static_cast<long>(pairs.size());
    int compared = 0, mismatched = 0;
    double sum_a = 0, sum_b = 0;
    for (const Pair& p : pairs) {
      sum_a += p.base;
      sum_b += p.moved;
      if (!p.compared) continue;
      ++compared;
      mismatched += p.base != p.moved;
    }
    const double N = static_cast<double>(std::max<std::size_t>(1, pairs.size()));
    row.estimate = sum_b / N;
    row.std_error = std::numeric_limits<double>::quiet_NaN();
    row.certified_fraction = compared / N;
    row.values = {{"systems", N}, {"compared", compared}, {"mismatched", mismatched},
                  {"mean_count_original", sum_a / N}, {"mean_count_transformed", sum_b / N}};
    row.verdicts.push_back(verdict("counts_invariant", mismatched == 0,
                                   std::to_string(mismatched) + " of " + std::to_string(compared) +
                                       " certified pairs differ"));
    row.verdicts.push_back(verdict("certified", compared >= 0.95 * N,
                                   std::to_string(compared) + " of " + show(N) + " pairs certified"));
    row.wall_time = seconds_since(t0);
    r.rows.push_back(std::move(row));
  }
  return r;
}

struct Entry {
  const char* name;
  const char* description;
  ExperimentReport (*run)(const ExperimentConfig&);
};

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> entries = {
      {"example-2n", "A_i = {0, e_i}: counting mean against 2^-n", example_2n},
      {"jindal-sweep", "univariate supports t = 2..20 against (2/pi) sqrt(t-1)", jindal_sweep},
      {"ek-vs-counting", "univariate counting and kinematic estimates against the EK integral",
       ek_vs_counting},
      {"mixed-bound-sweep", "random n = 2 supports: counting mean against the mixed vertex bound",
       mixed_bound_sweep},
      {"mvr-product", "product supports: counting against the product identity", mvr_product},
      {"unmixed-compare", "unmixed vertex bound against 2^(1-n) C(t, n)", unmixed_compare},
      {"concentration", "stretched supports: fraction of samples with a zero outside a ball",
       concentration},
      {"cone-identities", "characteristic function, sigma, determinant and Segre checks",
       cone_identities},
      {"invariance", "per-sample counts under translation, linear maps and scaling", invariance},
  };
  return entries;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Entry& e : catalog()) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

std::string experiment_description(const std::string& name) {
  for (const Entry& e : catalog())
    if (name == e.name) return e.description;
  throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
  for (const Entry& e : catalog()) {
    if (cfg.experiment != e.name) continue;
    ExperimentReport r = e.run(cfg);
    r.experiment = cfg.experiment;
    r.seed = cfg.seed;
    r.samples = cfg.samples;
    for (Plot& p : r.plots) {
      if (p.file.empty() || p.file == ".svg") p.file = cfg.experiment + ".svg";
      if (p.title.empty()) p.title = cfg.experiment;
    }
    return r;
  }
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace fewlab
