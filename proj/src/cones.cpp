#include "fewlab/cones.hpp"

#include "fewlab/geometry.hpp"
#include "fewlab/lp.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace fewlab {

namespace {

constexpr double kInteriorTol = 1e-9;
constexpr double kFacetTol = 1e-10;

Eigen::Index numeric_rank(const MatrixXd& m, double tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const VectorXd& s = svd.singularValues();
  const double top = s.size() ? s(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, top)) ++r;
  return r;
}

MatrixXd normalized_columns(MatrixXd g) {
  for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j).normalize();
  return g;
}

// Stellar triangulation of cone(gens) inside R^d, where gens span R^d.
// Pieces are returned as d x d generator matrices.
void stellar(const MatrixXd& gens, std::vector<MatrixXd>& out) {
  const Eigen::Index d = gens.rows();
  const Eigen::Index k = gens.cols();
  if (k == d) {
    out.push_back(gens);
    return;
  }
  if (d == 1) {
    out.push_back(gens.col(0));
    return;
  }
  const MatrixXd unit = normalized_columns(gens);
  std::set<std::vector<int>> seen;
  geometry_detail::for_each_combination(
      static_cast<int>(k), static_cast<int>(d - 1),
      [&](const std::vector<int>& idx) {
        MatrixXd M(d - 1, d);
        for (Eigen::Index r = 0; r < d - 1; ++r)
          M.row(r) = unit.col(idx[r]).transpose();
        Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeFullV);
        if (svd.singularValues()(d - 2) <= 1e-9) return;
        VectorXd h = svd.matrixV().col(d - 1);
        const VectorXd dots = unit.transpose() * h;
        if (dots.minCoeff() < -kFacetTol) {
          if (dots.maxCoeff() > kFacetTol) return;  // not a supporting plane
          h = -h;
        }
        const VectorXd sd = unit.transpose() * h;
        std::vector<int> facet;
        for (Eigen::Index j = 0; j < k; ++j)
          if (std::abs(sd(j)) <= kFacetTol) facet.push_back(static_cast<int>(j));
        if (!seen.insert(facet).second) return;
        // Skip facets through the apex generator.
        if (std::abs(sd(0)) <= kFacetTol) return;
        // Recurse in coordinates of the facet's span (orthogonal to h).
        MatrixXd basis = orthogonal_complement(h);
        MatrixXd fg(d - 1, static_cast<Eigen::Index>(facet.size()));
        for (std::size_t j = 0; j < facet.size(); ++j)
          fg.col(j) = basis.transpose() * gens.col(facet[j]);
        std::vector<MatrixXd> sub;
        stellar(fg, sub);
        for (const auto& piece : sub) {
          MatrixXd full(d, d);
          full.col(0) = gens.col(0);
          full.rightCols(d - 1) = basis * piece;
          out.push_back(full);
        }
      });
}

}  // namespace

const char* to_string(CharFnMethod m) {
  switch (m) {
    case CharFnMethod::kExactSimplicial:
      return "exact-simplicial";
    case CharFnMethod::kTriangulated:
      return "triangulated";
    case CharFnMethod::kMonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

ProperCone ProperCone::from_generators(MatrixXd generators) {
  const Eigen::Index n = generators.rows();
  if (n == 0 || generators.cols() == 0)
    throw std::invalid_argument("cone needs at least one generator");
  for (Eigen::Index j = 0; j < generators.cols(); ++j)
    if (!(generators.col(j).norm() > 0.0))
      throw std::invalid_argument("cone generator is zero");
  if (numeric_rank(normalized_columns(generators)) < n)
    throw std::invalid_argument("cone is not full dimensional");
  const auto sep = lp::separation<double>(normalized_columns(generators),
                                          VectorXd::Zero(n));
  if (!(sep.slack > 1e-9)) throw std::invalid_argument("cone is not pointed");
  ProperCone c;
  c.ambient_dim = n;
  c.simplicial = generators.cols() == n;
  c.generators = std::move(generators);
  return c;
}

ProperCone ProperCone::orthant(Eigen::Index n) {
  return from_generators(MatrixXd::Identity(n, n));
}

SubspacePair SubspacePair::make(MatrixXd V, MatrixXd W) {
  if (V.rows() != W.rows())
    throw std::invalid_argument("subspace bases differ in ambient dimension");
  const Eigen::Index n = V.rows();
  if (V.cols() + W.cols() != n)
    throw std::invalid_argument("subspace dimensions are not complementary");
  auto orthonormal = [](const MatrixXd& B) {
    if (B.cols() == 0) return true;
    const MatrixXd G = B.transpose() * B;
    return (G - MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() <=
           1e-10;
  };
  if (!orthonormal(V) || !orthonormal(W))
    throw std::invalid_argument("subspace basis is not orthonormal");
  return {std::move(V), std::move(W), n};
}

ProperCone dual_cone(const ProperCone& c) {
  if (c.simplicial)
    return ProperCone::from_generators(
        c.generators.transpose().fullPivLu().inverse());
  Cone d = cone_from_halfspaces(c.generators.transpose(), c.ambient_dim);
  return ProperCone::from_generators(d.generators);
}

std::vector<MatrixXd> triangulate(const ProperCone& c) {
  std::vector<MatrixXd> out;
  stellar(c.generators, out);
  return out;
}

bool in_dual_interior(const ProperCone& c, const VectorXd& x) {
  const double nx = x.norm();
  for (Eigen::Index j = 0; j < c.generators.cols(); ++j) {
    const auto g = c.generators.col(j);
    if (!(x.dot(g) > kInteriorTol * nx * g.norm())) return false;
  }
  return true;
}

CharFnValue char_function(const ProperCone& c, const VectorXd& x) {
  if (x.size() != c.ambient_dim)
    throw std::invalid_argument("char_function: dimension mismatch");
  if (!in_dual_interior(c, x))
    throw DomainError(
        "char_function: x is not interior to the dual cone; integral diverges");
  auto simplex_value = [&](const MatrixXd& G) {
    const VectorXd gx = G.transpose() * x;
    return std::abs(G.determinant()) / gx.prod();
  };
  if (c.simplicial)
    return {simplex_value(c.generators), CharFnMethod::kExactSimplicial, 0.0};
  double total = 0.0;
  for (const auto& piece : triangulate(c)) total += simplex_value(piece);
  return {total, CharFnMethod::kTriangulated, 0.0};
}

CharFnValue char_function_mc(const ProperCone& c, const VectorXd& x,
                             std::int64_t samples, std::uint64_t seed) {
  if (samples < 1)
    throw std::invalid_argument("char_function_mc: samples must be >= 1");
  if (!in_dual_interior(c, x))
    throw DomainError(
        "char_function_mc: x is not interior to the dual cone");
  const Eigen::Index n = c.ambient_dim;
  // The slice is conv(0, g / <x, g>), so its box comes from those points.
  VectorXd lo = VectorXd::Zero(n), hi = VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < c.generators.cols(); ++j) {
    const VectorXd p = c.generators.col(j) / x.dot(c.generators.col(j));
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // Membership test through the inequality description of C.
  const MatrixXd H = c.simplicial
                         ? MatrixXd(c.generators.fullPivLu().inverse())
                         : MatrixXd(dual_cone(c).generators.transpose());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::int64_t hits = 0;
  VectorXd y(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) y(i) = lo(i) + (hi(i) - lo(i)) * u(rng);
    if (x.dot(y) <= 1.0 && (H * y).minCoeff() >= 0.0) ++hits;
  }
  const double box = (hi - lo).prod();
  const double fact = std::tgamma(static_cast<double>(n) + 1.0);
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {fact * box * p, CharFnMethod::kMonteCarlo,
          fact * box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

CrucialResult crucial_inequality(const ProperCone& c, const MatrixXd& b) {
  const Eigen::Index n = c.ambient_dim;
  if (b.rows() != n || b.cols() != n)
    throw std::invalid_argument("crucial_inequality: need n vectors in R^n");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < c.generators.cols(); ++j)
      if (b.col(i).dot(c.generators.col(j)) <
          -1e-12 * b.col(i).norm() * c.generators.col(j).norm())
        throw std::invalid_argument(
            "crucial_inequality: vector outside the dual cone");
  const double det = std::abs(b.determinant());
  double scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) scale *= b.col(i).norm();
  if (det <= 1e-14 * scale) return {0.0, true};
  const double lhs = det * char_function(c, b.rowwise().sum()).value;
  return {lhs, lhs <= 1.0 + 1e-9};
}

double sigma(const SubspacePair& p) {
  MatrixXd m(p.ambient_dim, p.ambient_dim);
  m << p.V, p.W;
  return std::abs(m.determinant());
}

double wedge_norm(std::span<const MatrixXd> bases) {
  if (bases.empty()) return 1.0;
  const Eigen::Index n = bases.front().rows();
  Eigen::Index k = 0;
  for (const auto& b : bases) k += b.cols();
  if (k != n)
    throw std::invalid_argument("wedge_norm: dimensions do not add up");
  MatrixXd m(n, n);
  Eigen::Index c = 0;
  for (const auto& b : bases) {
    m.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return std::abs(m.determinant());
}

MatrixXd orthogonal_complement(const MatrixXd& basis) {
  const Eigen::Index n = basis.rows();
  if (basis.cols() == 0) return MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<MatrixXd> svd(basis, Eigen::ComputeFullU);
  const Eigen::Index r = numeric_rank(basis);
  return svd.matrixU().rightCols(n - r);
}

double projection_det(const SubspacePair& p) {
  const MatrixXd Vp = orthogonal_complement(p.V);
  return std::abs((p.W.transpose() * Vp).determinant());
}

MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index k,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXd a(n, k);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ() * MatrixXd::Identity(n, k);
}

}  // namespace fewlab
