#include "fewlab/geometry.hpp"

#include "fewlab/lp.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fewlab {

namespace {

constexpr double kVertexSlack = 1e-9;
constexpr double kMergeTol = 1e-9;

bool is_integral(double x) {
  return std::isfinite(x) && x == std::round(x) && std::abs(x) < 9.0e15;
}

Matrix<Rational> to_rational(const MatrixXd& m) {
  Matrix<Rational> r(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) r(i, j) = Rational(m(i, j));
  return r;
}

MatrixXd to_double_matrix(const Matrix<Rational>& m) {
  MatrixXd r(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      r(i, j) = static_cast<double>(m(i, j));
  return r;
}

// Columns of `pts` other than j.
template <typename S>
Matrix<S> drop_column(const Matrix<S>& pts, Eigen::Index j) {
  Matrix<S> out(pts.rows(), pts.cols() - 1);
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < pts.cols(); ++c)
    if (c != j) out.col(k++) = pts.col(c);
  return out;
}

// Separation slack for the floating path, with the point cloud rescaled to
// unit size so the 1e-9 threshold is relative.
lp::Separation<double> double_separation(MatrixXd diffs) {
  const double scale = diffs.size() ? diffs.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) {
    if (diffs.cols() == 0) return {1.0, VectorXd::Zero(diffs.rows())};
    return {0.0, {}};
  }
  diffs /= scale;
  return lp::separation<double>(diffs, VectorXd::Zero(diffs.rows()));
}

double double_slack(const MatrixXd& diffs) {
  return double_separation(diffs).slack;
}

// Gordan alternative: some nonzero lambda >= 0 with diffs * lambda = 0.
// Found in floating point, then verified exactly on its support.
bool exact_gordan_certificate(const Matrix<Rational>& diffs,
                              const MatrixXd& dd) {
  const Eigen::Index d = dd.rows();
  const Eigen::Index m = dd.cols();
  MatrixXd A(2 * d + 2, m);
  VectorXd b = VectorXd::Zero(2 * d + 2);
  A.topRows(d) = dd;
  A.middleRows(d, d) = -dd;
  A.row(2 * d).setOnes();
  A.row(2 * d + 1).setConstant(-1.0);
  b(2 * d) = 1.0;
  b(2 * d + 1) = -1.0;
  // Tiny tolerance on the equalities so roundoff does not make it infeasible.
  b.head(2 * d).array() += 1e-12;
  const auto sol = lp::maximize<double>(A, b, VectorXd::Zero(m));
  if (sol.status != lp::Status::kOptimal) return false;
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < m; ++j)
    if (sol.x(j) > 1e-12) support.push_back(j);
  if (support.empty()) return false;
  const Eigen::Index k = static_cast<Eigen::Index>(support.size());
  Matrix<Rational> M(d + 1, k);
  Vector<Rational> rhs = Vector<Rational>::Zero(d + 1);
  for (Eigen::Index j = 0; j < k; ++j) {
    M.block(0, j, d, 1) = diffs.col(support[j]);
    M(d, j) = Rational(1);
  }
  rhs(d) = Rational(1);
  const auto lam = lp::solve_particular<Rational>(M, rhs);
  if (!lam) return false;
  for (Eigen::Index j = 0; j < k; ++j)
    if ((*lam)(j) < Rational(0)) return false;
  return true;
}

// Exact strict-separability test for integer or rational data. The
// floating LP proposes a witness either way; only if neither witness
// verifies exactly do we pay for the rational simplex.
double exact_separation(const Matrix<Rational>& diffs) {
  if (diffs.cols() == 0) return 1.0;
  const MatrixXd dd = to_double_matrix(diffs);
  const auto sep = double_separation(dd);
  if (sep.slack > kVertexSlack) {
    Vector<Rational> omega(sep.omega.size());
    for (Eigen::Index i = 0; i < omega.size(); ++i)
      omega(i) = Rational(sep.omega(i));
    bool ok = true;
    for (Eigen::Index j = 0; j < diffs.cols() && ok; ++j) {
      Rational dot(0);
      for (Eigen::Index i = 0; i < omega.size(); ++i)
        dot += diffs(i, j) * omega(i);
      ok = dot > Rational(0);
    }
    if (ok) return sep.slack;
  } else if (exact_gordan_certificate(diffs, dd)) {
    return 0.0;
  }
  const Rational s = lp::separation_slack<Rational>(
      diffs, Vector<Rational>::Zero(diffs.rows()));
  if (s <= Rational(0)) return 0.0;
  return std::max(static_cast<double>(s), std::numeric_limits<double>::min());
}

}  // namespace

Support::Support(MatrixXd points) : points_(std::move(points)) {
  if (points_.cols() == 0) throw std::invalid_argument("support is empty");
  if (points_.rows() == 0)
    throw std::invalid_argument("support has dimension 0");
  if (!points_.allFinite())
    throw std::invalid_argument("support has non-finite coordinates");
  for (Eigen::Index i = 0; i < points_.cols(); ++i)
    for (Eigen::Index j = i + 1; j < points_.cols(); ++j)
      if (points_.col(i) == points_.col(j))
        throw std::invalid_argument("support points are not distinct");
  bool integral = true;
  for (Eigen::Index k = 0; k < points_.size() && integral; ++k)
    integral = is_integral(points_.data()[k]);
  if (integral) exact_ = to_rational(points_);
}

Support Support::from_rational(const Matrix<Rational>& points) {
  Support s(to_double_matrix(points));
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    for (Eigen::Index j = i + 1; j < points.cols(); ++j)
      if (points.col(i) == points.col(j))
        throw std::invalid_argument("support points are not distinct");
  s.exact_ = points;
  return s;
}

int Polytope::find_vertex(const VectorXd& v) const {
  for (Eigen::Index j = 0; j < vertices.cols(); ++j)
    if ((vertices.col(j) - v).norm() <= kMergeTol * (1.0 + v.norm()))
      return static_cast<int>(j);
  return -1;
}

Eigen::Index affine_dimension(const MatrixXd& points) {
  if (points.cols() <= 1) return 0;
  MatrixXd diffs = points.rightCols(points.cols() - 1).colwise() -
                   points.col(0);
  const double scale = diffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(diffs / scale);
  const VectorXd& s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-9) ++r;
  return r;
}

Polytope hull_vertices(const Support& support) {
  Polytope poly;
  poly.ambient_dim = support.dim();
  const Eigen::Index t = support.size();
  std::vector<int> keep;
  if (support.exact()) {
    const Matrix<Rational>& pts = support.exact_points();
    for (Eigen::Index j = 0; j < t; ++j) {
      Matrix<Rational> others = drop_column(pts, j);
      for (Eigen::Index c = 0; c < others.cols(); ++c)
        others.col(c) -= pts.col(j);
      if (exact_separation(others) > 0.0) keep.push_back(static_cast<int>(j));
    }
    Matrix<Rational> ev(pts.rows(), keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) ev.col(k) = pts.col(keep[k]);
    poly.exact_vertices = ev;
  } else {
    const MatrixXd& pts = support.points();
    for (Eigen::Index j = 0; j < t; ++j) {
      const MatrixXd others = drop_column(pts, j).colwise() - pts.col(j);
      if (double_slack(others) > kVertexSlack)
        keep.push_back(static_cast<int>(j));
    }
  }
  poly.vertices.resize(support.dim(), keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k)
    poly.vertices.col(k) = support.points().col(keep[k]);
  poly.source_index = keep;
  if (poly.exact_vertices) {
    if (keep.size() <= 1) {
      poly.affine_dim = 0;
    } else {
      Matrix<Rational> d(poly.ambient_dim, keep.size() - 1);
      for (std::size_t k = 1; k < keep.size(); ++k)
        d.col(k - 1) = poly.exact_vertices->col(k) -
                       poly.exact_vertices->col(0);
      poly.affine_dim = lp::rank<Rational>(d);
    }
  } else {
    poly.affine_dim = affine_dimension(poly.vertices);
  }
  return poly;
}

bool VertexDecomposition::has_marginal() const {
  for (const auto& e : entries)
    if (e.marginal) return true;
  return false;
}

Polytope VertexDecomposition::sum() const {
  Polytope p;
  p.ambient_dim = ambient_dim;
  p.vertices.resize(ambient_dim, static_cast<Eigen::Index>(entries.size()));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    p.vertices.col(k) = entries[k].vertex;
    p.source_index.push_back(static_cast<int>(k));
  }
  p.affine_dim = affine_dimension(p.vertices);
  return p;
}

VertexDecomposition minkowski_vertex_decomposition(
    std::span<const Polytope> polys) {
  VertexDecomposition dec;
  if (polys.empty()) return dec;
  const Eigen::Index d = polys.front().ambient_dim;
  for (const auto& p : polys) {
    if (p.ambient_dim != d)
      throw std::invalid_argument("polytopes differ in ambient dimension");
    if (p.num_vertices() == 0)
      throw std::invalid_argument("polytope without vertices");
  }
  dec.ambient_dim = d;
  bool exact = true;
  for (const auto& p : polys) exact = exact && p.exact_vertices.has_value();

  const std::size_t k = polys.size();
  std::vector<int> tuple(k, 0);
  for (;;) {
    // A tuple is a sum-vertex iff one weight is strictly minimized at each
    // chosen summand vertex.
    Eigen::Index ncons = 0;
    for (std::size_t i = 0; i < k; ++i) ncons += polys[i].num_vertices() - 1;
    double slack = 0.0;
    if (exact) {
      Matrix<Rational> diffs(d, ncons);
      Eigen::Index c = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const auto& ev = *polys[i].exact_vertices;
        for (Eigen::Index j = 0; j < ev.cols(); ++j)
          if (j != tuple[i]) diffs.col(c++) = ev.col(j) - ev.col(tuple[i]);
      }
      slack = exact_separation(diffs);
    } else {
      MatrixXd diffs(d, ncons);
      Eigen::Index c = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const auto& ev = polys[i].vertices;
        for (Eigen::Index j = 0; j < ev.cols(); ++j)
          if (j != tuple[i]) diffs.col(c++) = ev.col(j) - ev.col(tuple[i]);
      }
      slack = double_slack(diffs);
    }
    const bool accept = exact ? slack > 0.0 : slack > kVertexSlack;
    if (accept) {
      SumVertex sv;
      sv.vertex = VectorXd::Zero(d);
      for (std::size_t i = 0; i < k; ++i)
        sv.vertex += polys[i].vertices.col(tuple[i]);
      sv.parts = tuple;
      sv.slack = slack;
      sv.marginal = !exact && slack < 100.0 * kVertexSlack;
      bool dup = false;
      for (const auto& e : dec.entries)
        if ((e.vertex - sv.vertex).norm() <=
            kMergeTol * (1.0 + sv.vertex.norm()))
          dup = true;
      if (!dup) dec.entries.push_back(std::move(sv));
    }
    std::size_t i = 0;
    while (i < k && ++tuple[i] == polys[i].num_vertices()) tuple[i++] = 0;
    if (i == k) break;
  }
  return dec;
}

Cone cone_from_halfspaces(const MatrixXd& rows_in, Eigen::Index dim) {
  std::vector<VectorXd> rows;
  for (Eigen::Index i = 0; i < rows_in.rows(); ++i) {
    const double nrm = rows_in.row(i).norm();
    if (nrm > 0.0) rows.push_back(rows_in.row(i).transpose() / nrm);
  }
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  MatrixXd R(m, dim);
  for (Eigen::Index i = 0; i < m; ++i) R.row(i) = rows[i].transpose();

  Eigen::Index d = 0;
  MatrixXd V = MatrixXd::Identity(dim, dim);
  if (m > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(R, Eigen::ComputeFullV);
    const VectorXd& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > 1e-9) ++d;
    V = svd.matrixV();
  }
  const MatrixXd Q = V.leftCols(d);           // row space
  const MatrixXd L = V.rightCols(dim - d);    // lineality space

  std::vector<VectorXd> rays;
  if (d > 0) {
    const MatrixXd Rt = R * Q;  // m x d, full column rank
    auto consider = [&](VectorXd z) {
      z.normalize();
      for (int sign : {1, -1}) {
        const VectorXd zz = sign * z;
        if ((Rt * zz).minCoeff() < -1e-9) continue;
        bool dup = false;
        for (const auto& r : rays) dup = dup || (r - zz).norm() < 1e-9;
        if (!dup) rays.push_back(zz);
      }
    };
    if (d == 1) {
      consider(VectorXd::Ones(1));
    } else {
      geometry_detail::for_each_combination(
          static_cast<int>(m), static_cast<int>(d - 1),
          [&](const std::vector<int>& idx) {
            MatrixXd M(d - 1, d);
            for (Eigen::Index r = 0; r < d - 1; ++r) M.row(r) = Rt.row(idx[r]);
            Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeFullV);
            if (svd.singularValues()(d - 2) <= 1e-9) return;
            consider(svd.matrixV().col(d - 1));
          });
    }
  }

  Cone cone;
  cone.ambient_dim = dim;
  cone.generators.resize(dim, static_cast<Eigen::Index>(rays.size()) +
                                  2 * L.cols());
  Eigen::Index c = 0;
  for (const auto& r : rays) cone.generators.col(c++) = Q * r;
  for (Eigen::Index j = 0; j < L.cols(); ++j) {
    cone.generators.col(c++) = L.col(j);
    cone.generators.col(c++) = -L.col(j);
  }
  return cone;
}

Cone normal_cone(const Polytope& poly, int vertex) {
  if (vertex < 0 || vertex >= poly.num_vertices())
    throw std::invalid_argument("normal_cone: not a vertex of the polytope");
  const Eigen::Index nv = poly.num_vertices();
  MatrixXd rows(nv - 1, poly.ambient_dim);
  Eigen::Index r = 0;
  for (Eigen::Index j = 0; j < nv; ++j)
    if (j != vertex)
      rows.row(r++) = (poly.vertices.col(j) - poly.vertices.col(vertex))
                          .transpose();
  return cone_from_halfspaces(rows, poly.ambient_dim);
}

Cone normal_cone(const Polytope& poly, const VectorXd& v) {
  return normal_cone(poly, poly.find_vertex(v));
}

bool cone_contains(const Cone& cone, const VectorXd& y, double tol) {
  const double ny = y.norm();
  if (ny == 0.0) return true;
  const Eigen::Index n = cone.ambient_dim;
  const Eigen::Index k = cone.generators.cols();
  if (k == 0) return false;
  MatrixXd G = cone.generators;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double g = G.col(j).norm();
    if (g > 0.0) G.col(j) /= g;
  }
  const VectorXd yy = y / ny;
  MatrixXd A(2 * n, k);
  VectorXd b(2 * n);
  A.topRows(n) = G;
  A.bottomRows(n) = -G;
  b.head(n) = yy.array() + tol;
  b.tail(n) = -yy.array() + tol;
  const auto sol = lp::maximize<double>(A, b, VectorXd::Zero(k));
  return sol.status == lp::Status::kOptimal;
}

bool fan_cover_check(std::span<const Polytope> polys, int probes,
                     std::uint64_t seed) {
  const VertexDecomposition dec = minkowski_vertex_decomposition(polys);
  const Polytope P = dec.sum();
  if (P.affine_dim < P.ambient_dim)
    throw DegenerateFanError(
        "Minkowski sum is not full dimensional; the normal fan is degenerate");
  const Eigen::Index n = P.ambient_dim;
  const Eigen::Index nv = P.num_vertices();

  // Inequality description of each normal cone: rows (x - v) / |x - v|.
  std::vector<MatrixXd> H(nv);
  for (Eigen::Index v = 0; v < nv; ++v) {
    H[v].resize(nv - 1, n);
    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < nv; ++j) {
      if (j == v) continue;
      const VectorXd e = P.vertices.col(j) - P.vertices.col(v);
      H[v].row(r++) = e.transpose() / e.norm();
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int p = 0; p < probes; ++p) {
    VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = normal(rng);
    y.normalize();
    int hits = 0;
    int interior = 0;
    for (Eigen::Index v = 0; v < nv; ++v) {
      const double m = nv > 1 ? (H[v] * y).minCoeff() : 1.0;
      if (m >= -1e-9) ++hits;
      if (m > 1e-7) ++interior;
    }
    if (hits == 0 || interior > 1) return false;
  }
  return true;
}

}  // namespace fewlab
