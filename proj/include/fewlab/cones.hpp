#pragma once

#include "fewlab/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fewlab {

/// Full-dimensional pointed polyhedral cone, given by generator columns.
struct ProperCone {
  MatrixXd generators;  // n x k
  Eigen::Index ambient_dim = 0;
  bool simplicial = false;

  /// Validates properness; throws std::invalid_argument otherwise.
  static ProperCone from_generators(MatrixXd generators);
  static ProperCone orthant(Eigen::Index n);
};

enum class CharFnMethod { kExactSimplicial, kTriangulated, kMonteCarlo };

const char* to_string(CharFnMethod m);

struct CharFnValue {
  double value = 0.0;
  CharFnMethod method = CharFnMethod::kExactSimplicial;
  double std_error = 0.0;
};

/// Pair of complementary subspaces given by orthonormal bases (columns).
struct SubspacePair {
  MatrixXd V;
  MatrixXd W;
  Eigen::Index ambient_dim = 0;

  /// Validates orthonormality (1e-10) and complementary dimensions.
  static SubspacePair make(MatrixXd V, MatrixXd W);
};

struct CrucialResult {
  double lhs = 0.0;
  bool holds = true;
};

ProperCone dual_cone(const ProperCone& c);

/// Stellar triangulation into simplicial cones (each an n x n generator
/// matrix). A simplicial cone is returned as is.
std::vector<MatrixXd> triangulate(const ProperCone& c);

/// True iff <x, g> > 1e-9 |x| |g| for every generator g.
bool in_dual_interior(const ProperCone& c, const VectorXd& x);

/// v_C(x) = integral over C of exp(-<x, y>). Throws DomainError unless x is
/// interior to the dual cone.
CharFnValue char_function(const ProperCone& c, const VectorXd& x);

/// n! vol{y in C : <x, y> <= 1} by rejection sampling in a bounding box.
CharFnValue char_function_mc(const ProperCone& c, const VectorXd& x,
                             std::int64_t samples, std::uint64_t seed);

/// |det[b_1 .. b_n]| v_C(b_1 + ... + b_n) for columns b_i of `b`, each in
/// the dual cone.
CrucialResult crucial_inequality(const ProperCone& c, const MatrixXd& b);

/// |det [V W]|.
double sigma(const SubspacePair& p);

/// |det| of the concatenation of orthonormal bases of any number of pieces
/// whose dimensions add up to the ambient dimension.
double wedge_norm(std::span<const MatrixXd> bases);

/// Orthonormal basis of the orthogonal complement of span(basis).
MatrixXd orthogonal_complement(const MatrixXd& basis);

/// |det| of the orthogonal projection of V-perp onto W, in orthonormal
/// bases of both.
double projection_det(const SubspacePair& p);

/// Random orthonormal k-frame in R^n (QR of a Gaussian matrix).
MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index k,
                            std::uint64_t seed);

}  // namespace fewlab
