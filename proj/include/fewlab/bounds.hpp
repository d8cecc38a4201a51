#pragma once

#include <optional>
#include <span>
#include <vector>

// Closed-form bounds and reference quantities for expected positive zeros.
// Everything is computed in log space through lgamma.

namespace fewlab {

/// Volume of real projective space P^n with the round metric,
/// pi^{(n+1)/2} / Gamma((n+1)/2).
double vol_projective(int n);
double log_vol_projective(int n);

/// E|x| for x standard Gaussian in R^n: sqrt(2) Gamma((n+1)/2) / Gamma(n/2).
double rho(int n);

/// (2 pi)^{-n/2} V0 prod(t_i - 1).
double bound_mixed(int n, std::span<const int> t, double V0);

/// V0 C(t-1, n) / vol(P^n).
double bound_unmixed(int n, int t, double V0);

/// 2^{1-n} C(t, n).
double bound_betc_unmixed(int n, int t);

/// (2 / pi) sqrt(t - 1).
double bound_jindal(int t);

/// pi^n / vol(P^n) * prod E(S_i).
double mvr_product_identity(std::span<const double> expectations);

/// log C(a, b) for real a >= b >= 0; -inf when b > a.
double log_binomial(double a, double b);

struct BoundInputs {
  int n = 1;
  std::vector<int> t;
  int V0 = 1;
  bool unmixed = false;  // all supports equal
  bool product = false;  // common support of product form S_1 x ... x S_n
};

/// Fields that do not apply to the configuration are left empty.
struct BoundReport {
  BoundInputs inputs;
  double thm_mixed = 0.0;
  std::optional<double> prop_unmixed;
  std::optional<double> betc_unmixed;
  std::optional<double> jindal;
  double kushnirenko_ref = 0.0;  // prod(t_i - 1)
  // Product supports: sqrt(t_1 ... t_n), the growth rate of the lower
  // bound construction with its unknown constant c^n omitted.
  std::optional<double> lower_bound_ref;
  // Non-normative: sqrt(t_1 ... t_n), shown only as a scale for comparison.
  double conjecture_reference_scale = 0.0;
};

BoundReport bound_report(const BoundInputs& in);

}  // namespace fewlab
