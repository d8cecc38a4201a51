#pragma once

#include "fewlab/geometry.hpp"
#include "fewlab/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace fewlab {

/// n exponential sums F_i(w) = sum_k c_i(k) exp(<a_ik, w>) in n variables.
/// Coefficient k of equation i belongs to column k of supports[i].
struct FewnomialSystem {
  std::vector<Support> supports;
  std::vector<VectorXd> coeffs;
  std::optional<std::uint64_t> seed;  // provenance when sampled

  /// Validates squareness and coefficient lengths.
  static FewnomialSystem make(std::vector<Support> supports,
                              std::vector<VectorXd> coeffs);

  Eigen::Index dim() const {
    return supports.empty() ? 0 : supports.front().dim();
  }
  Eigen::Index size() const {
    return static_cast<Eigen::Index>(supports.size());
  }
};

/// value = mantissa * exp(log_scale), where log_scale = max_a <a, w>.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }
};

ScaledValue eval_scaled(const Support& s, const VectorXd& c,
                        const VectorXd& w);
std::vector<ScaledValue> eval_scaled(const FewnomialSystem& sys,
                                     const VectorXd& w);

VectorXd eval(const FewnomialSystem& sys, const VectorXd& w);

/// dF_i/dw_j = sum_a c_i(a) a_j exp(<a, w>).
MatrixXd jacobian(const FewnomialSystem& sys, const VectorXd& w);

/// Jacobian with row i multiplied by exp(-max_a <a, w>); same zero set and
/// determinant sign as the unscaled one.
MatrixXd jacobian_scaled(const FewnomialSystem& sys, const VectorXd& w);

/// Central differences with step h.
MatrixXd jacobian_fd(const FewnomialSystem& sys, const VectorXd& w,
                     double h = 1e-6);

/// Coefficients i.i.d. standard normal, drawn equation by equation.
FewnomialSystem sample_gaussian(std::vector<Support> supports,
                                std::uint64_t seed);

/// Redraws the coefficients of sys in place, with the same stream as
/// sample_gaussian for that seed.
void resample_gaussian(FewnomialSystem& sys, std::uint64_t seed);

/// Replaces A_i by A_i + b_i, keeping coefficients by index.
FewnomialSystem translate_support(const FewnomialSystem& sys,
                                  const std::vector<VectorXd>& shifts);

/// Replaces every A_i by g A_i. Zeros move by w -> g^{-T} w.
FewnomialSystem gl_transform(const FewnomialSystem& sys, const MatrixXd& g);

/// Replaces A_i by lambda_i A_i (lambda_i != 0).
FewnomialSystem scale_supports(const FewnomialSystem& sys,
                               const std::vector<double>& lambdas);

std::vector<Polytope> newton_polytopes(const FewnomialSystem& sys);

}  // namespace fewlab
