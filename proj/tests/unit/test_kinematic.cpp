#include "doctest.h"
#include "fewlab/bounds.hpp"
#include "fewlab/counting.hpp"
#include "fewlab/kinematic.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fewlab;

namespace {

Support line_support(std::initializer_list<double> pts) {
  MatrixXd m(1, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (double p : pts) m(0, j++) = p;
  return Support(m);
}

Support columns(std::initializer_list<std::initializer_list<double>> cols) {
  const auto t = static_cast<Eigen::Index>(cols.size());
  const auto d = static_cast<Eigen::Index>(cols.begin()->size());
  MatrixXd m(d, t);
  Eigen::Index k = 0;
  for (auto col : cols) {
    Eigen::Index j = 0;
    for (double x : col) m(j++, k) = x;
    ++k;
  }
  return Support(m);
}

std::vector<Support> decoupled(int n) {
  std::vector<Support> out;
  for (int i = 0; i < n; ++i) {
    MatrixXd m = MatrixXd::Zero(n, 2);
    m(i, 1) = 1.0;
    out.emplace_back(m);
  }
  return out;
}

VectorXd random_w(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = g(rng);
  return w;
}

}  // namespace

TEST_CASE("tangent map of {0, 1} at the origin") {
  const TangentMap tm = tangent_map({line_support({0, 1})}, VectorXd::Zero(1));
  REQUIRE(tm.T.size() == 1);
  CHECK(tm.T[0].rows() == 2);
  CHECK(tm.T[0].cols() == 1);
  CHECK(tm.u[0](0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(tm.u[0](1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(tm.u[0].dot(tm.T[0].col(0))) < 1e-15);
  // Speed of the curve is 1 / (2 cosh w).
  CHECK(tm.T[0].norm() == doctest::Approx(0.5));
}

TEST_CASE("tangent map is orthogonal and matches finite differences") {
  std::mt19937_64 rng(3);
  const std::vector<Support> sup = {
      columns({{0, 0}, {2, 1}, {1, 3}, {0, 2}}),
      columns({{1, 0}, {0, 1}, {3, 3}})};
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd w = random_w(rng, 2, 1.5);
    const TangentMap tm = tangent_map(sup, w);
    for (std::size_t i = 0; i < sup.size(); ++i) {
      CHECK((tm.T[i].transpose() * tm.u[i]).norm() < 1e-10);
      const double h = 1e-6;
      for (int j = 0; j < 2; ++j) {
        VectorXd e = VectorXd::Zero(2);
        e(j) = h;
        const VectorXd fd =
            (tangent_map(sup, w + e).u[i] - tangent_map(sup, w - e).u[i]) / (2 * h);
        CHECK((fd - tm.T[i].col(j)).norm() < 1e-5);
      }
    }
  }
  // Far out, where one term dominates by a huge factor.
  VectorXd w(2);
  w << 400.0, -250.0;
  const TangentMap tm = tangent_map(sup, w);
  for (const auto& T : tm.T) CHECK(T.allFinite());
}

TEST_CASE("integrand special cases") {
  // t_i = 1 gives a zero row.
  const std::vector<Support> single = {columns({{1, 1}}),
                                       columns({{0, 0}, {1, 0}, {0, 1}})};
  CHECK(integrand(single, VectorXd::Zero(2), 100, 1).value == 0.0);
  // Lower dimensional sum.
  const Support line = columns({{0, 0}, {1, 0}, {2, 0}});
  CHECK(integrand({line, line}, VectorXd::Zero(2), 100, 1).value == 0.0);
  // n = 1 is exact: (1 / pi) |T|.
  const IntegrandEstimate e = integrand({line_support({0, 1})}, VectorXd::Zero(1), 10, 1);
  CHECK(e.value == doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-14));
  CHECK(e.std_error == 0.0);
}

TEST_CASE("n = 1 integrand equals the EK density") {
  const Support s = line_support({0, 1, 3, 4, 9});
  for (double w : {-3.0, -0.4, 0.0, 0.7, 2.5}) {
    VectorXd wv(1);
    wv << w;
    CHECK(integrand({s}, wv, 1, 1).value ==
          doctest::Approx(ek_density(s, w)).epsilon(1e-12));
  }
}

TEST_CASE("integrand is dominated by the selection sum") {
  std::mt19937_64 rng(5);
  const std::vector<Support> sup = {
      columns({{0, 0}, {2, 1}, {1, 3}, {0, 2}}),
      columns({{1, 0}, {0, 1}, {3, 3}})};
  const std::vector<Support> sup3 = {
      columns({{0, 0, 0}, {1, 0, 0}, {0, 1, 1}}),
      columns({{0, 0, 0}, {0, 2, 0}, {1, 0, 1}}),
      columns({{0, 0, 0}, {0, 0, 1}, {1, 1, 0}, {2, 1, 1}})};
  for (int trial = 0; trial < 60; ++trial) {
    const VectorXd w = random_w(rng, 2, 2.0);
    const IntegrandEstimate e = integrand(sup, w, 4000, 100 + trial);
    CHECK(e.value <= selection_bound(sup, w) + 3.0 * e.std_error);
    const VectorXd w3 = random_w(rng, 3, 2.0);
    const IntegrandEstimate e3 = integrand(sup3, w3, 4000, 200 + trial);
    CHECK(e3.value <= selection_bound(sup3, w3) + 3.0 * e3.std_error);
  }
}

TEST_CASE("integrand standard error scales like 1 / sqrt(N)") {
  const std::vector<Support> sup = {
      columns({{0, 0}, {2, 1}, {1, 3}, {0, 2}}),
      columns({{1, 0}, {0, 1}, {3, 3}})};
  VectorXd w(2);
  w << 0.3, -0.2;
  double ratio_sum = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    const double a = integrand(sup, w, 2000, 10 + r).std_error;
    const double b = integrand(sup, w, 4000, 50 + r).std_error;
    ratio_sum += b / a;
  }
  CHECK(ratio_sum / reps == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("kinematic estimate of the decoupled example") {
  for (int n : {1, 2, 3}) {
    KinematicOptions opts;
    opts.lambda_samples = n == 3 ? 400 : 2000;
    opts.cubature.max_cells = n == 3 ? 600 : 3000;
    const KinematicEstimate e = expected_zeros_kinematic(decoupled(n), opts, 7);
    const double expect = std::pow(0.5, n);
    CHECK(std::abs(e.estimate - expect) <= 3.0 * e.combined_error + 1e-6);
    CHECK(e.combined_error < 0.02);
  }
}

TEST_CASE("kinematic n = 1 matches the EK oracle") {
  for (auto s : {line_support({0, 1, 3}), line_support({-2, 0, 5, 6, 11}),
                 line_support({0, 0.5, 0.75, 4})}) {
    const KinematicEstimate e = expected_zeros_kinematic({s});
    CHECK(e.estimate == doctest::Approx(ek_expected_univariate(s)).epsilon(1e-3));
  }
}

TEST_CASE("kinematic estimate is zero for degenerate configurations") {
  const Support line = columns({{0, 0}, {1, 0}, {2, 0}});
  CHECK(expected_zeros_kinematic({line, line}).estimate == 0.0);
  CHECK(expected_zeros_kinematic({columns({{1, 1}}), line}).estimate == 0.0);
}

TEST_CASE("kinematic estimate under transformations of the supports") {
  const Support s1 = columns({{0, 0}, {1, 0}, {0, 2}});
  const Support s2 = columns({{0, 0}, {2, 0}, {1, 1}});
  KinematicOptions opts;
  opts.lambda_samples = 1500;
  const KinematicEstimate base = expected_zeros_kinematic({s1, s2}, opts, 3);
  // Translation by b_i and a common linear map g.
  MatrixXd g(2, 2);
  g << 2, 1, 1, 1;
  const MatrixXd p1 = (g * s1.points()).colwise() + Eigen::Vector2d(3, -1);
  const MatrixXd p2 = g * s2.points();
  const KinematicEstimate moved =
      expected_zeros_kinematic({Support(p1), Support(p2)}, opts, 3);
  CHECK(std::abs(moved.estimate - base.estimate) <=
        3.0 * std::hypot(moved.combined_error, base.combined_error));
}

TEST_CASE("Gaussian determinant moment") {
  CHECK(rho(1) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
  CHECK(rho(2) * rho(1) == doctest::Approx(1.0).epsilon(1e-14));
  for (int n = 1; n <= 5; ++n) {
    double prod = 1.0;
    for (int k = 1; k <= n; ++k) prod *= rho(k);
    CHECK(std::abs(prod - std::pow(2.0 * std::numbers::pi, 0.5 * n) /
                              vol_projective(n)) < 1e-10);
    double se = 0.0;
    const double m = gaussian_det_moment(n, 200000, 40 + n, &se);
    CHECK(std::abs(m - prod) < 3.0 * se);
  }
}

TEST_CASE("Segre map is isometric") {
  CHECK(segre_isometry_check(1, 1, 20, 1) < 1e-6);
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n) CHECK(segre_isometry_check(m, n, 20, 7 * m + n) < 1e-5);
  CHECK(segre_isometry_check(3, 2, 5, 1, true) == 0.0);
}

TEST_CASE("projected Gaussian second moments are at most one") {
  for (int p : {1, 3, 6})
    for (int m : {1, 4}) {
      const SecondMomentCheck c = projected_gaussian_moments(p, m, 100000, p * 10 + m);
      CHECK(c.max_moment <= 1.0 + 3.0 * c.std_error);
    }
}

TEST_CASE("chart inverse is a contraction") {
  for (int m : {1, 2, 5}) CHECK(chart_derivative_norm(m, 500, m) <= 1.0 + 1e-8);
}
