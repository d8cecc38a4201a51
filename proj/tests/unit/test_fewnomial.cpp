#include "doctest.h"
#include "fewlab/fewnomial.hpp"

#include <cmath>
#include <random>

using namespace fewlab;

namespace {

Support line_support(std::initializer_list<double> pts) {
  MatrixXd m(1, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (double p : pts) m(0, j++) = p;
  return Support(m);
}

FewnomialSystem univariate(std::initializer_list<double> pts,
                           std::initializer_list<double> c) {
  VectorXd cv(static_cast<Eigen::Index>(c.size()));
  Eigen::Index j = 0;
  for (double x : c) cv(j++) = x;
  return FewnomialSystem::make({line_support(pts)}, {cv});
}

std::vector<Support> random_supports(std::mt19937_64& rng, int n, int t) {
  std::uniform_int_distribution<int> u(0, 4);
  std::vector<Support> out;
  while (static_cast<int>(out.size()) < n) {
    MatrixXd m(n, t);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
    try {
      out.emplace_back(m);
    } catch (const std::invalid_argument&) {
    }
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

TEST_CASE("eval examples") {
  auto sys = univariate({0, 1}, {-1, 1});
  CHECK(eval(sys, VectorXd::Zero(1))(0) == doctest::Approx(0.0));
  VectorXd w(1);
  w << std::log(2.0);
  CHECK(eval(sys, w)(0) == doctest::Approx(1.0));

  auto single = univariate({3}, {-0.7});
  for (double x : {-50.0, 0.0, 12.0}) {
    w << x;
    CHECK(eval(single, w)(0) != 0.0);
  }
}

TEST_CASE("scaled evaluation survives overflow") {
  auto sys = univariate({0, 100}, {-1, 1});
  VectorXd w(1);
  w << 10.0;  // exp(1000) overflows
  const auto sv = eval_scaled(sys, w);
  CHECK(sv[0].log_scale == doctest::Approx(1000.0));
  CHECK(sv[0].mantissa == doctest::Approx(1.0));
  CHECK(std::isinf(eval(sys, w)(0)));
}

TEST_CASE("jacobian") {
  auto sys = univariate({0, 1}, {-1, 1});
  CHECK(jacobian(sys, VectorXd::Zero(1))(0, 0) == doctest::Approx(1.0));

  std::mt19937_64 rng(1);
  for (int r = 0; r < 30; ++r) {
    const int n = 1 + r % 3;
    auto s = sample_gaussian(random_supports(rng, n, 4), 100 + r);
    const VectorXd w = random_w(rng, n, 0.3);
    const MatrixXd J = jacobian(s, w);
    const MatrixXd F = jacobian_fd(s, w);
    CHECK((J - F).norm() <= 1e-6 * std::max(1.0, J.norm()));
  }

  // Supports on a common line: rank deficient everywhere.
  MatrixXd a(2, 3), b(2, 3);
  a << 0, 1, 2, 0, 1, 2;
  b << 0, 2, 3, 0, 2, 3;
  auto deg = sample_gaussian({Support(a), Support(b)}, 5);
  for (int r = 0; r < 10; ++r) {
    Eigen::FullPivLU<MatrixXd> lu(jacobian(deg, random_w(rng, 2, 1.0)));
    CHECK(lu.rank() < 2);
  }
}

TEST_CASE("sample_gaussian") {
  std::mt19937_64 rng(2);
  auto sup = random_supports(rng, 2, 4);
  auto a = sample_gaussian(sup, 42);
  auto b = sample_gaussian(sup, 42);
  CHECK(a.coeffs[0] == b.coeffs[0]);
  CHECK(a.coeffs[1] == b.coeffs[1]);
  CHECK(a.seed == std::optional<std::uint64_t>(42));

  // CLT check over 10^6 draws of a single coefficient, and cross-seed
  // correlation.
  const int N = 1000000;
  std::vector<Support> one = {line_support({0})};
  double sum = 0.0, sq = 0.0, cross = 0.0;
  for (int i = 0; i < N; ++i) {
    const double x = sample_gaussian(one, 2 * i).coeffs[0](0);
    const double y = sample_gaussian(one, 2 * i + 1).coeffs[0](0);
    sum += x;
    sq += x * x;
    cross += x * y;
  }
  const double mean = sum / N;
  const double var = sq / N - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(N));
  CHECK(std::abs(var - 1.0) < 0.01);
  CHECK(std::abs(cross / N) < 0.01);
}

TEST_CASE("transformations") {
  std::mt19937_64 rng(3);
  SUBCASE("translation multiplies by exp(<b, w>)") {
    for (int r = 0; r < 30; ++r) {
      const int n = 1 + r % 3;
      auto s = sample_gaussian(random_supports(rng, n, 3), r);
      std::vector<VectorXd> shifts;
      for (int i = 0; i < n; ++i) shifts.push_back(random_w(rng, n, 2.0));
      auto t = translate_support(s, shifts);
      const VectorXd w = random_w(rng, n, 0.5);
      const VectorXd f = eval(s, w), g = eval(t, w);
      for (int i = 0; i < n; ++i)
        CHECK(g(i) == doctest::Approx(std::exp(shifts[i].dot(w)) * f(i))
                          .epsilon(1e-12));
    }
  }
  SUBCASE("identity map leaves the system unchanged") {
    auto s = sample_gaussian(random_supports(rng, 2, 3), 7);
    auto t = gl_transform(s, MatrixXd::Identity(2, 2));
    for (int i = 0; i < 2; ++i) {
      CHECK(t.supports[i].points() == s.supports[i].points());
      CHECK(t.coeffs[i] == s.coeffs[i]);
      CHECK(t.supports[i].exact());
    }
  }
  SUBCASE("linear map moves the zero set by g^{-T}") {
    for (int r = 0; r < 20; ++r) {
      const int n = 2 + r % 2;
      auto s = sample_gaussian(random_supports(rng, n, 3), 50 + r);
      MatrixXd g = MatrixXd::NullaryExpr(n, n, [&] { return random_w(rng, 1, 1.0)(0); });
      if (std::abs(g.determinant()) < 0.1) continue;
      auto t = gl_transform(s, g);
      const VectorXd w = random_w(rng, n, 0.3);
      const VectorXd v = g.transpose().fullPivLu().solve(w);
      // F_{gA}(g^{-T} w) = F_A(w)
      CHECK((eval(t, v) - eval(s, w)).norm() <=
            1e-10 * std::max(1.0, eval(s, w).norm()));
    }
  }
  SUBCASE("singular map rejected") {
    auto s = sample_gaussian(random_supports(rng, 2, 3), 7);
    CHECK_THROWS(gl_transform(s, MatrixXd::Ones(2, 2)));
  }
  SUBCASE("scaling") {
    auto s = sample_gaussian(random_supports(rng, 2, 3), 8);
    auto t = scale_supports(s, {2.0, -3.0});
    CHECK(t.supports[0].points() == 2.0 * s.supports[0].points());
    CHECK(t.supports[1].points() == -3.0 * s.supports[1].points());
    CHECK_THROWS(scale_supports(s, {0.0, 1.0}));
  }
}

TEST_CASE("system validation") {
  CHECK_THROWS(FewnomialSystem::make({line_support({0, 1})}, {VectorXd::Ones(3)}));
  MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  CHECK_THROWS(FewnomialSystem::make({Support(a)}, {VectorXd::Ones(2)}));
}
