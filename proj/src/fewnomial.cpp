#include "fewlab/fewnomial.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fewlab {

namespace {

Support map_support(const Support& s, const MatrixXd& g, const VectorXd& b) {
  if (s.exact()) {
    // Stay exact when the map has integer entries.
    bool integral = true;
    for (Eigen::Index i = 0; i < g.size(); ++i)
      integral = integral && g.data()[i] == std::round(g.data()[i]);
    for (Eigen::Index i = 0; i < b.size(); ++i)
      integral = integral && b(i) == std::round(b(i));
    if (integral) {
      const Matrix<Rational>& p = s.exact_points();
      Matrix<Rational> out(g.rows(), p.cols());
      for (Eigen::Index j = 0; j < p.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          Rational acc(b(i));
          for (Eigen::Index k = 0; k < g.cols(); ++k)
            acc += Rational(g(i, k)) * p(k, j);
          out(i, j) = acc;
        }
      return Support::from_rational(out);
    }
  }
  MatrixXd pts = (g * s.points()).colwise() + b;
  return Support(pts);
}

}  // namespace

FewnomialSystem FewnomialSystem::make(std::vector<Support> supports,
                                      std::vector<VectorXd> coeffs) {
  if (supports.empty()) throw std::invalid_argument("system has no equations");
  const Eigen::Index n = supports.front().dim();
  if (static_cast<Eigen::Index>(supports.size()) != n)
    throw std::invalid_argument("system is not square");
  if (coeffs.size() != supports.size())
    throw std::invalid_argument("one coefficient vector per equation");
  for (std::size_t i = 0; i < supports.size(); ++i) {
    if (supports[i].dim() != n)
      throw std::invalid_argument("supports differ in dimension");
    if (coeffs[i].size() != supports[i].size())
      throw std::invalid_argument("coefficient count differs from support size");
  }
  FewnomialSystem sys;
  sys.supports = std::move(supports);
  sys.coeffs = std::move(coeffs);
  return sys;
}

ScaledValue eval_scaled(const Support& s, const VectorXd& c,
                        const VectorXd& w) {
  const VectorXd e = s.points().transpose() * w;
  const double m = e.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k) acc += c(k) * std::exp(e(k) - m);
  return {acc, m};
}

std::vector<ScaledValue> eval_scaled(const FewnomialSystem& sys,
                                     const VectorXd& w) {
  std::vector<ScaledValue> out;
  out.reserve(sys.supports.size());
  for (std::size_t i = 0; i < sys.supports.size(); ++i)
    out.push_back(eval_scaled(sys.supports[i], sys.coeffs[i], w));
  return out;
}

VectorXd eval(const FewnomialSystem& sys, const VectorXd& w) {
  VectorXd f(sys.size());
  const auto sv = eval_scaled(sys, w);
  for (std::size_t i = 0; i < sv.size(); ++i) f(i) = sv[i].value();
  return f;
}

MatrixXd jacobian_scaled(const FewnomialSystem& sys, const VectorXd& w) {
  const Eigen::Index n = sys.size();
  MatrixXd J = MatrixXd::Zero(n, sys.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const MatrixXd& A = sys.supports[i].points();
    const VectorXd e = A.transpose() * w;
    const double m = e.maxCoeff();
    for (Eigen::Index k = 0; k < A.cols(); ++k)
      J.row(i) += sys.coeffs[i](k) * std::exp(e(k) - m) * A.col(k).transpose();
  }
  return J;
}

MatrixXd jacobian(const FewnomialSystem& sys, const VectorXd& w) {
  MatrixXd J = jacobian_scaled(sys, w);
  for (Eigen::Index i = 0; i < sys.size(); ++i)
    J.row(i) *= std::exp((sys.supports[i].points().transpose() * w).maxCoeff());
  return J;
}

MatrixXd jacobian_fd(const FewnomialSystem& sys, const VectorXd& w, double h) {
  const Eigen::Index n = sys.dim();
  MatrixXd J(sys.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    VectorXd wp = w, wm = w;
    wp(j) += h;
    wm(j) -= h;
    J.col(j) = (eval(sys, wp) - eval(sys, wm)) / (2.0 * h);
  }
  return J;
}

FewnomialSystem sample_gaussian(std::vector<Support> supports,
                                std::uint64_t seed) {
  std::vector<VectorXd> coeffs;
  for (const auto& s : supports) coeffs.push_back(VectorXd::Zero(s.size()));
  FewnomialSystem sys =
      FewnomialSystem::make(std::move(supports), std::move(coeffs));
  resample_gaussian(sys, seed);
  return sys;
}

void resample_gaussian(FewnomialSystem& sys, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (VectorXd& c : sys.coeffs)
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
  sys.seed = seed;
}

FewnomialSystem translate_support(const FewnomialSystem& sys,
                                  const std::vector<VectorXd>& shifts) {
  if (static_cast<Eigen::Index>(shifts.size()) != sys.size())
    throw std::invalid_argument("one shift per equation");
  const Eigen::Index n = sys.dim();
  FewnomialSystem out = sys;
  for (std::size_t i = 0; i < shifts.size(); ++i)
    out.supports[i] =
        map_support(sys.supports[i], MatrixXd::Identity(n, n), shifts[i]);
  return out;
}

FewnomialSystem gl_transform(const FewnomialSystem& sys, const MatrixXd& g) {
  const Eigen::Index n = sys.dim();
  if (g.rows() != n || g.cols() != n)
    throw std::invalid_argument("gl_transform: g must be n x n");
  Eigen::FullPivLU<MatrixXd> lu(g);
  if (!lu.isInvertible()) throw std::invalid_argument("gl_transform: g is singular");
  FewnomialSystem out = sys;
  for (auto& s : out.supports) s = map_support(s, g, VectorXd::Zero(n));
  return out;
}

FewnomialSystem scale_supports(const FewnomialSystem& sys,
                               const std::vector<double>& lambdas) {
  if (static_cast<Eigen::Index>(lambdas.size()) != sys.size())
    throw std::invalid_argument("one scale factor per equation");
  const Eigen::Index n = sys.dim();
  FewnomialSystem out = sys;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] == 0.0 || !std::isfinite(lambdas[i]))
      throw std::invalid_argument("scale factor must be finite and nonzero");
    out.supports[i] = map_support(sys.supports[i],
                                  lambdas[i] * MatrixXd::Identity(n, n),
                                  VectorXd::Zero(n));
  }
  return out;
}

std::vector<Polytope> newton_polytopes(const FewnomialSystem& sys) {
  std::vector<Polytope> out;
  for (const auto& s : sys.supports) out.push_back(hull_vertices(s));
  return out;
}

}  // namespace fewlab
