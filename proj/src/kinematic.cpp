#include "fewlab/kinematic.hpp"

#include "fewlab/counting.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fewlab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kAbsGaussMean = std::sqrt(2.0 / kPi);  // E|N(0,1)|

// Fills T (t x n) for one support at w.
void tangent_block(const Support& s, const VectorXd& w, MatrixXd& T,
                   VectorXd& u) {
  const MatrixXd& A = s.points();
  const VectorXd h = A.transpose() * w;
  const double M = h.maxCoeff();
  const VectorXd g = (h.array() - M).exp().matrix();
  const double norm = g.norm();
  u = g / norm;
  // d gamma / dw = diag(g) A^T, then project and divide by |gamma|.
  const MatrixXd dg = g.asDiagonal() * A.transpose();
  T = (dg - u * (u.transpose() * dg)) / norm;
}

void require_dims(const std::vector<Support>& supports, const VectorXd& w) {
  const auto n = static_cast<Eigen::Index>(supports.size());
  if (n == 0) throw std::invalid_argument("kinematic: no supports");
  for (const Support& s : supports)
    if (s.dim() != n)
      throw std::invalid_argument("kinematic: supports must live in R^n");
  if (w.size() != n) throw std::invalid_argument("kinematic: w has wrong size");
  if (!w.allFinite()) throw std::invalid_argument("kinematic: w must be finite");
}

// Draws of lambda_i for the first n - 1 equations, t_i x K each.
std::vector<MatrixXd> draw_lambdas(const std::vector<Support>& supports, int K,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<MatrixXd> out;
  for (std::size_t i = 0; i + 1 < supports.size(); ++i) {
    MatrixXd L(supports[i].size(), K);
    for (Eigen::Index k = 0; k < L.size(); ++k) L.data()[k] = g(rng);
    out.push_back(std::move(L));
  }
  return out;
}

// Per-draw values of (2 pi)^{-n/2} E[|det| | rows 1..n-1] at one point.
void conditional_dets(const TangentMap& tm, const std::vector<MatrixXd>& lambdas,
                      int K, Eigen::Ref<VectorXd> out) {
  const auto n = static_cast<Eigen::Index>(tm.T.size());
  const double scale = std::pow(2.0 * kPi, -0.5 * n) * kAbsGaussMean;
  const MatrixXd S = tm.T.back().transpose() * tm.T.back();  // n x n
  if (n == 1) {
    out.setConstant(scale * std::sqrt(std::max(0.0, S(0, 0))));
    return;
  }
  std::vector<MatrixXd> rows;  // n x K each
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    rows.push_back(tm.T[i].transpose() * lambdas[i]);
  for (int k = 0; k < K; ++k) {
    // Cofactors along the last row.
    Eigen::Vector3d c;
    if (n == 2) {
      c << -rows[0](1, k), rows[0](0, k), 0.0;
    } else {
      const Eigen::Vector3d r1 = rows[0].col(k);
      const Eigen::Vector3d r2 = rows[1].col(k);
      c = r1.cross(r2);
    }
    const VectorXd cv = c.head(n);
    out(k) = scale * std::sqrt(std::max(0.0, cv.dot(S * cv)));
  }
}

bool degenerate(const std::vector<Support>& supports) {
  const SystemGeometry geo = SystemGeometry::of(supports);
  return geo.trivially_empty || !geo.full_dimensional;
}

}  // namespace

TangentMap tangent_map(const std::vector<Support>& supports, const VectorXd& w) {
  require_dims(supports, w);
  TangentMap tm;
  tm.T.resize(supports.size());
  tm.u.resize(supports.size());
  for (std::size_t i = 0; i < supports.size(); ++i)
    tangent_block(supports[i], w, tm.T[i], tm.u[i]);
  return tm;
}

IntegrandEstimate integrand(const std::vector<Support>& supports,
                            const VectorXd& w, int lambda_samples,
                            std::uint64_t seed) {
  require_dims(supports, w);
  if (lambda_samples < 1)
    throw std::invalid_argument("integrand: lambda_samples must be >= 1");
  IntegrandEstimate est;
  est.lambda_samples = lambda_samples;
  if (degenerate(supports)) return est;
  const TangentMap tm = tangent_map(supports, w);
  const auto lambdas = draw_lambdas(supports, lambda_samples, seed);
  VectorXd v(lambda_samples);
  conditional_dets(tm, lambdas, lambda_samples, v);
  est.value = v.mean();
  if (lambda_samples > 1) {
    const double var =
        (v.array() - est.value).square().sum() / (lambda_samples - 1);
    est.std_error = std::sqrt(var / lambda_samples);
  }
  return est;
}

double selection_bound(const std::vector<Support>& supports, const VectorXd& w) {
  require_dims(supports, w);
  const auto n = static_cast<Eigen::Index>(supports.size());
  // Chart Jacobian rows (a - a0) exp<a - a0, w> for a != a0, a0 maximizing.
  std::vector<MatrixXd> blocks;
  for (const Support& s : supports) {
    const MatrixXd& A = s.points();
    const VectorXd h = A.transpose() * w;
    Eigen::Index ref;
    h.maxCoeff(&ref);
    MatrixXd B(A.cols() - 1, n);
    Eigen::Index r = 0;
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      if (k == ref) continue;
      B.row(r++) = (A.col(k) - A.col(ref)).transpose() * std::exp(h(k) - h(ref));
    }
    if (B.rows() == 0) return 0.0;
    blocks.push_back(std::move(B));
  }
  double total = 0.0;
  std::vector<Eigen::Index> sel(static_cast<std::size_t>(n), 0);
  MatrixXd M(n, n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i)
      M.row(i) = blocks[static_cast<std::size_t>(i)].row(sel[static_cast<std::size_t>(i)]);
    total += std::abs(M.determinant());
    Eigen::Index i = 0;
    while (i < n && ++sel[static_cast<std::size_t>(i)] ==
                        blocks[static_cast<std::size_t>(i)].rows())
      sel[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return std::pow(2.0 * kPi, -0.5 * n) * total;
}

KinematicEstimate expected_zeros_kinematic(const std::vector<Support>& supports,
                                           const KinematicOptions& opts,
                                           std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(supports.size());
  if (n < 1 || n > 3)
    throw std::invalid_argument("expected_zeros_kinematic: n must be 1, 2 or 3");
  require_dims(supports, VectorXd::Zero(n));
  KinematicEstimate est;
  if (degenerate(supports)) return est;
  const int K = n == 1 ? 1 : opts.lambda_samples;
  if (K < 2 && n > 1)
    throw std::invalid_argument("expected_zeros_kinematic: need >= 2 lambda samples");
  const auto lambdas = draw_lambdas(supports, K, seed);

  auto f = [&](const VectorXd& s, VectorXd& out) {
    VectorXd w(n);
    double jac = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double q = 1.0 - s(j) * s(j);
      w(j) = s(j) / q;
      jac *= (1.0 + s(j) * s(j)) / (q * q);
    }
    const TangentMap tm = tangent_map(supports, w);
    conditional_dets(tm, lambdas, K, out);
    out *= jac;
  };
  const CubatureResult cr = adaptive_cubature(
      f, K, VectorXd::Constant(n, -1.0), VectorXd::Constant(n, 1.0),
      opts.cubature);
  est.estimate = cr.integral.mean();
  if (K > 1) {
    const double var =
        (cr.integral.array() - est.estimate).square().sum() / (K - 1);
    est.std_error = std::sqrt(var / K);
  }
  est.quad_error = cr.error;
  est.combined_error = std::hypot(est.std_error, est.quad_error);
  est.cells = cr.cells;
  est.evaluations = cr.evaluations;
  est.converged = cr.converged;
  return est;
}

double gaussian_det_moment(int n, long samples, std::uint64_t seed,
                           double* std_error) {
  if (n < 1) throw std::invalid_argument("gaussian_det_moment: n must be >= 1");
  if (samples < 2)
    throw std::invalid_argument("gaussian_det_moment: need >= 2 samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXd M(n, n);
  double sum = 0.0, sq = 0.0;
  for (long k = 0; k < samples; ++k) {
    for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = g(rng);
    const double d = std::abs(M.determinant());
    sum += d;
    sq += d * d;
  }
  const double mean = sum / samples;
  if (std_error) {
    const double var = (sq - samples * mean * mean) / (samples - 1);
    *std_error = std::sqrt(std::max(0.0, var) / samples);
  }
  return mean;
}

double segre_isometry_check(int m, int n, int samples, std::uint64_t seed,
                            bool zero_tangents) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("segre_isometry_check: m, n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto gauss = [&](int d) {
    VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = g(rng);
    return v;
  };
  auto tangent = [&](const VectorXd& base) {
    if (zero_tangents) return VectorXd::Zero(base.size()).eval();
    VectorXd v = gauss(static_cast<int>(base.size()));
    return (v - base * base.dot(v)).eval();
  };
  // Normalized Segre image; representatives are unit so this is the map
  // between unit spheres.
  auto segre = [](const VectorXd& x, const VectorXd& y) {
    const VectorXd xn = x.normalized(), yn = y.normalized();
    VectorXd out(xn.size() * yn.size());
    for (Eigen::Index i = 0; i < xn.size(); ++i)
      out.segment(i * yn.size(), yn.size()) = xn(i) * yn;
    return out;
  };
  const double h = 1e-5;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const VectorXd x = gauss(m + 1).normalized();
    const VectorXd y = gauss(n + 1).normalized();
    const VectorXd xi1 = tangent(x), eta1 = tangent(y);
    const VectorXd xi2 = tangent(x), eta2 = tangent(y);
    auto deriv = [&](const VectorXd& xi, const VectorXd& eta) {
      return ((segre(x + h * xi, y + h * eta) - segre(x - h * xi, y - h * eta)) /
              (2.0 * h))
          .eval();
    };
    const VectorXd d1 = deriv(xi1, eta1), d2 = deriv(xi2, eta2);
    const double before = xi1.dot(xi2) + eta1.dot(eta2);
    worst = std::max(worst, std::abs(d1.dot(d2) - before));
    const double before11 = xi1.squaredNorm() + eta1.squaredNorm();
    worst = std::max(worst, std::abs(d1.squaredNorm() - before11));
  }
  return worst;
}

SecondMomentCheck projected_gaussian_moments(int p, int m, long samples,
                                             std::uint64_t seed) {
  if (p < 1 || m < 1 || samples < 2)
    throw std::invalid_argument("projected_gaussian_moments: bad sizes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> shrink(0.5, 1.0);
  MatrixXd A(p, m);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
  const double op = Eigen::JacobiSVD<MatrixXd>(A).singularValues()(0);
  A *= shrink(rng) / op;
  VectorXd sum = VectorXd::Zero(m), sq = VectorXd::Zero(m);
  VectorXd y(p);
  for (long k = 0; k < samples; ++k) {
    for (int i = 0; i < p; ++i) y(i) = g(rng);
    const VectorXd z2 = (A.transpose() * y).array().square();
    sum += z2;
    sq += z2.cwiseProduct(z2);
  }
  SecondMomentCheck out;
  Eigen::Index j;
  const VectorXd mean = sum / static_cast<double>(samples);
  out.max_moment = mean.maxCoeff(&j);
  const double var = (sq(j) - samples * mean(j) * mean(j)) / (samples - 1);
  out.std_error = std::sqrt(std::max(0.0, var) / samples);
  return out;
}

double chart_derivative_norm(int m, int samples, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("chart_derivative_norm: m must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> logscale(-4.0, 4.0);
  auto chart_inverse = [](const VectorXd& yp) {
    VectorXd v(yp.size() + 1);
    v(0) = 1.0;
    v.tail(yp.size()) = yp;
    return (v / v.norm()).eval();
  };
  const double h = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    VectorXd yp(m);
    const double sc = std::exp(logscale(rng));
    for (int i = 0; i < m; ++i) yp(i) = sc * g(rng);
    MatrixXd D(m + 1, m);
    for (int j = 0; j < m; ++j) {
      VectorXd e = VectorXd::Zero(m);
      e(j) = h;
      D.col(j) = (chart_inverse(yp + e) - chart_inverse(yp - e)) / (2.0 * h);
    }
    worst = std::max(worst, Eigen::JacobiSVD<MatrixXd>(D).singularValues()(0));
  }
  return worst;
}

}  // namespace fewlab
