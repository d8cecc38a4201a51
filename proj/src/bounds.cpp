#include "fewlab/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fewlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

double log_vol_projective(int n) {
  if (n < 0) throw std::invalid_argument("vol_projective: n must be >= 0");
  const double h = 0.5 * (n + 1);
  return h * std::log(kPi) - std::lgamma(h);
}

double vol_projective(int n) { return std::exp(log_vol_projective(n)); }

double rho(int n) {
  if (n < 1) throw std::invalid_argument("rho: n must be >= 1");
  return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (n + 1)) -
                                   std::lgamma(0.5 * n));
}

double log_binomial(double a, double b) {
  if (b < 0.0 || b > a) return -std::numeric_limits<double>::infinity();
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

double bound_mixed(int n, std::span<const int> t, double V0) {
  if (V0 < 1.0) throw std::invalid_argument("bound_mixed: V0 must be >= 1");
  if (static_cast<int>(t.size()) != n)
    throw std::invalid_argument("bound_mixed: need one t_i per equation");
  double log_v = std::log(V0) - 0.5 * n * std::log(2.0 * kPi);
  for (int ti : t) {
    if (ti < 1) throw std::invalid_argument("bound_mixed: t_i must be >= 1");
    if (ti == 1) return 0.0;
    log_v += std::log(static_cast<double>(ti - 1));
  }
  return std::exp(log_v);
}

double bound_unmixed(int n, int t, double V0) {
  if (t < 1) throw std::invalid_argument("bound_unmixed: t must be >= 1");
  if (t - 1 < n) return 0.0;
  return std::exp(std::log(V0) + log_binomial(t - 1, n) -
                  log_vol_projective(n));
}

double bound_betc_unmixed(int n, int t) {
  if (t < n) return 0.0;
  return std::exp((1 - n) * std::log(2.0) + log_binomial(t, n));
}

double bound_jindal(int t) {
  if (t < 1) throw std::invalid_argument("bound_jindal: t must be >= 1");
  return 2.0 / kPi * std::sqrt(static_cast<double>(t - 1));
}

double mvr_product_identity(std::span<const double> expectations) {
  const int n = static_cast<int>(expectations.size());
  double log_v = n * std::log(kPi) - log_vol_projective(n);
  for (double e : expectations) {
    if (e < 0.0) throw std::invalid_argument("expectation must be >= 0");
    if (e == 0.0) return 0.0;
    log_v += std::log(e);
  }
  return std::exp(log_v);
}

BoundReport bound_report(const BoundInputs& in) {
  BoundReport r;
  r.inputs = in;
  r.thm_mixed = bound_mixed(in.n, in.t, in.V0);
  double kush = 1.0, prod_t = 1.0;
  for (int ti : in.t) {
    kush *= ti - 1;
    prod_t *= ti;
  }
  r.kushnirenko_ref = kush;
  r.conjecture_reference_scale = std::sqrt(prod_t);
  if (in.unmixed && !in.t.empty()) {
    r.prop_unmixed = bound_unmixed(in.n, in.t.front(), in.V0);
    r.betc_unmixed = bound_betc_unmixed(in.n, in.t.front());
  }
  if (in.n == 1 && !in.t.empty()) r.jindal = bound_jindal(in.t.front());
  if (in.product) r.lower_bound_ref = std::sqrt(prod_t);
  return r;
}

}  // namespace fewlab
