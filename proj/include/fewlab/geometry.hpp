#pragma once

#include "fewlab/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fewlab {

/// Finite set of exponent vectors, stored column-wise (dim x t).
///
/// A support is *exact* when every coordinate is rational input (an integer
/// or an explicit num/den pair); exact supports get exact vertex tests.
class Support {
 public:
  Support() = default;

  /// Columns are the exponent vectors. Integer-valued input is recorded
  /// as exact.
  explicit Support(MatrixXd points);

  static Support from_rational(const Matrix<Rational>& points);

  Eigen::Index dim() const { return points_.rows(); }
  Eigen::Index size() const { return points_.cols(); }
  const MatrixXd& points() const { return points_; }
  VectorXd point(Eigen::Index i) const { return points_.col(i); }

  bool exact() const { return exact_.has_value(); }
  const Matrix<Rational>& exact_points() const { return *exact_; }

 private:
  MatrixXd points_;
  std::optional<Matrix<Rational>> exact_;
};

struct Polytope {
  MatrixXd vertices;                   // ambient_dim x V
  std::optional<Matrix<Rational>> exact_vertices;
  std::vector<int> source_index;       // column in the originating support
  Eigen::Index ambient_dim = 0;
  Eigen::Index affine_dim = 0;

  Eigen::Index num_vertices() const { return vertices.cols(); }
  /// Index of the vertex equal to v (within 1e-9), or -1.
  int find_vertex(const VectorXd& v) const;
};

/// Set of nonnegative combinations of the generator columns.
struct Cone {
  MatrixXd generators;                 // ambient_dim x k
  Eigen::Index ambient_dim = 0;
};

struct SumVertex {
  VectorXd vertex;
  std::vector<int> parts;              // vertex index into each summand
  double slack = 0.0;                  // separation margin of the witness
  bool marginal = false;               // slack within 100x of the threshold
};

struct VertexDecomposition {
  std::vector<SumVertex> entries;
  Eigen::Index ambient_dim = 0;

  std::size_t size() const { return entries.size(); }
  bool has_marginal() const;
  /// The Minkowski sum as a polytope (vertices in entry order).
  Polytope sum() const;
};

/// Extreme points of conv(support) and the affine dimension of the hull.
Polytope hull_vertices(const Support& support);

/// Every vertex of P_1 + ... + P_k together with its unique decomposition
/// into summand vertices.
VertexDecomposition minkowski_vertex_decomposition(
    std::span<const Polytope> polys);

/// Inner normal cone {y : <x - v, y> >= 0 for all x in P} at vertex v.
/// Throws std::invalid_argument if v is not a vertex.
Cone normal_cone(const Polytope& poly, const VectorXd& v);
Cone normal_cone(const Polytope& poly, int vertex);

/// Generators of {y : rows * y >= 0}. Lineality directions are returned as
/// +/- pairs, so the result is pointed iff the row matrix has full column
/// rank.
Cone cone_from_halfspaces(const MatrixXd& rows, Eigen::Index dim);

/// LP membership test of y in cone(generators), relative tolerance tol.
bool cone_contains(const Cone& cone, const VectorXd& y, double tol = 1e-9);

/// Probe-based check that the normal cones at the vertices of the sum cover
/// R^n and overlap only on their boundaries. Throws DegenerateFanError when
/// the sum is not full dimensional.
bool fan_cover_check(std::span<const Polytope> polys, int probes = 10000,
                     std::uint64_t seed = 1);

/// Rank of {p_j - p_0} over the columns, relative tolerance 1e-9.
Eigen::Index affine_dimension(const MatrixXd& points);

namespace geometry_detail {
/// Calls fn(indices) for every k-subset of {0, ..., m-1} in lexicographic
/// order.
template <typename Fn>
void for_each_combination(int m, int k, Fn&& fn) {
  if (k > m || k < 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(static_cast<const std::vector<int>&>(idx));
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}
}  // namespace geometry_detail

}  // namespace fewlab
