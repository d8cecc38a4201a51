#pragma once

#include "fewlab/geometry.hpp"
#include "fewlab/quadrature.hpp"

#include <cstdint>
#include <vector>

namespace fewlab {

/// Derivatives of the normalized moment curves w -> gamma_i / |gamma_i|,
/// gamma_i(w) = (exp<a, w>)_{a in A_i}. T[i] is t_i x n with columns
/// orthogonal to u[i] = gamma_i / |gamma_i|.
struct TangentMap {
  std::vector<MatrixXd> T;
  std::vector<VectorXd> u;
};

TangentMap tangent_map(const std::vector<Support>& supports, const VectorXd& w);

struct IntegrandEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int lambda_samples = 0;
};

/// (2 pi)^{-n/2} E |det[lambda_i^T T_i]| over independent standard
/// Gaussian lambda_i. The last row is averaged in closed form given the
/// others, so n = 1 is exact.
IntegrandEstimate integrand(const std::vector<Support>& supports,
                            const VectorXd& w, int lambda_samples,
                            std::uint64_t seed);

/// (2 pi)^{-n/2} sum over row selections of |det| of the chart Jacobian,
/// in the affine chart of the currently largest term of each equation.
double selection_bound(const std::vector<Support>& supports, const VectorXd& w);

struct KinematicOptions {
  int lambda_samples = 2000;
  CubatureOptions cubature{2e-4, 1e-3, 3000, 4};
};

struct KinematicEstimate {
  double estimate = 0.0;
  double std_error = 0.0;   // over lambda samples
  double quad_error = 0.0;  // cubature error estimate
  double combined_error = 0.0;
  int cells = 0;
  long evaluations = 0;
  bool converged = true;
};

/// Integral of the integrand over R^n, n in {1, 2, 3}. Each coordinate is
/// compactified by w = s / (1 - s^2) and the same lambda draws are used at
/// every node. Zero when some t_i = 1 or the Minkowski sum is lower
/// dimensional.
KinematicEstimate expected_zeros_kinematic(const std::vector<Support>& supports,
                                           const KinematicOptions& opts = {},
                                           std::uint64_t seed = 1);

/// Monte Carlo mean of |det| of an n x n standard Gaussian matrix.
double gaussian_det_moment(int n, long samples, std::uint64_t seed = 1,
                           double* std_error = nullptr);

/// Largest deviation between <xi, xi'> + <eta, eta'> and the inner product
/// of the finite-difference derivatives of the normalized Segre map
/// (x, y) -> x (x) y on the unit spheres of R^{m+1} and R^{n+1}.
double segre_isometry_check(int m, int n, int samples, std::uint64_t seed = 1,
                            bool zero_tangents = false);

struct SecondMomentCheck {
  double max_moment = 0.0;  // largest E z_j^2 estimate over components
  double std_error = 0.0;   // at that component
};

/// z = y A for a random p x m matrix A with |A| <= 1 and Gaussian y.
SecondMomentCheck projected_gaussian_moments(int p, int m, long samples,
                                             std::uint64_t seed = 1);

/// Largest operator norm of the derivative of the chart inverse
/// y' -> (1, y') / |(1, y')| over random points of R^m.
double chart_derivative_norm(int m, int samples, std::uint64_t seed = 1);

}  // namespace fewlab
