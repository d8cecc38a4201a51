#pragma once

#include "fewlab/fewnomial.hpp"
#include "fewlab/geometry.hpp"

#include <optional>
#include <vector>

namespace fewlab {

struct CountOptions {
  std::optional<double> fixed_radius;  // empty: radius from exclusion_radius
  int max_depth = 60;
  double newton_tol = 1e-12;
  double degeneracy_tol = 1e-10;
  long max_boxes = 2'000'000;  // subdivision budget per system
};

struct CountResult {
  int count = 0;
  bool certified = true;
  std::vector<VectorXd> zeros;
  bool discarded_degenerate = false;
  double max_zero_norm = 0.0;
  double radius = 0.0;  // search radius used (0 for n = 1)
  long boxes = 0;       // boxes visited by the subdivision
};

/// Support-dependent data reused across coefficient samples.
struct SystemGeometry {
  std::vector<Polytope> polytopes;
  VertexDecomposition decomposition;
  bool full_dimensional = false;
  bool trivially_empty = false;  // some t_i = 1

  static SystemGeometry of(const std::vector<Support>& supports);
};

/// Zeros of sum_k c_k exp(a_k w) on the real line.
CountResult count_univariate(const Support& s, const VectorXd& c,
                             const CountOptions& opts = {});

/// Expected number of real zeros of the Gaussian exponential sum with
/// support s, integrating the density (1/pi) sqrt(H''(2w)),
/// H(s) = log sum_a exp(a s).
double ek_expected_univariate(const Support& s);

/// Zero density (1/pi) sqrt(H''(2w)) at a point.
double ek_density(const Support& s, double w);

struct ExclusionRadius {
  double radius = 0.0;
  bool certified = false;
};

/// Radius outside which the system has no zeros, from dominance of a single
/// term in some equation. Not certified when a direction is critical for
/// all equations at once and cannot be resolved (n = 3 only); the radius is
/// then a heuristic enlargement. Throws
/// DegenerateFanError when the Minkowski sum is lower dimensional.
ExclusionRadius exclusion_radius(const FewnomialSystem& sys,
                                 const SystemGeometry* geo = nullptr);

/// Interval branch-and-prune count on [-R, R]^n for n = 2 or 3.
CountResult count_multivariate(const FewnomialSystem& sys,
                               const CountOptions& opts = {},
                               const SystemGeometry* geo = nullptr);

/// Dispatches on the dimension (n = 1: count_univariate).
CountResult count_zeros(const FewnomialSystem& sys,
                        const CountOptions& opts = {},
                        const SystemGeometry* geo = nullptr);

}  // namespace fewlab
