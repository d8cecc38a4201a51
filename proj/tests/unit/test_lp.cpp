#include "doctest.h"
#include "fewlab/lp.hpp"

using namespace fewlab;

TEST_CASE("maximize: textbook problem") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  MatrixXd A(3, 2);
  A << 1, 0, 0, 2, 3, 2;
  VectorXd b(3), c(2);
  b << 4, 12, 18;
  c << 3, 5;
  auto s = lp::maximize<double>(A, b, c);
  REQUIRE(s.status == lp::Status::kOptimal);
  CHECK(s.objective == doctest::Approx(36));
  CHECK(s.x(0) == doctest::Approx(2));
  CHECK(s.x(1) == doctest::Approx(6));
}

TEST_CASE("maximize: negative right-hand sides need phase one") {
  // max -x - y with x + y >= 2 (as -x - y <= -2), x <= 5
  MatrixXd A(2, 2);
  A << -1, -1, 1, 0;
  VectorXd b(2), c(2);
  b << -2, 5;
  c << -1, -1;
  auto s = lp::maximize<double>(A, b, c);
  REQUIRE(s.status == lp::Status::kOptimal);
  CHECK(s.objective == doctest::Approx(-2));
}

TEST_CASE("maximize: infeasible and unbounded") {
  MatrixXd A(2, 1);
  A << 1, -1;
  VectorXd b(2), c(1);
  b << 1, -2;  // x <= 1 and x >= 2
  c << 1;
  CHECK(lp::maximize<double>(A, b, c).status == lp::Status::kInfeasible);

  MatrixXd A2(1, 2);
  A2 << 1, -1;
  VectorXd b2(1), c2(2);
  b2 << 1;
  c2 << 0, 1;
  CHECK(lp::maximize<double>(A2, b2, c2).status == lp::Status::kUnbounded);
}

TEST_CASE("maximize: exact rationals") {
  Matrix<Rational> A(2, 2);
  A << Rational(1), Rational(1), Rational(1), Rational(3);
  Vector<Rational> b(2), c(2);
  b << Rational(1), Rational(2);
  c << Rational(1), Rational(2);
  auto s = lp::maximize<Rational>(A, b, c);
  REQUIRE(s.status == lp::Status::kOptimal);
  // Vertex (1/2, 1/2) gives 3/2.
  CHECK(s.objective == Rational(3, 2));
}

TEST_CASE("separation slack certifies vertices") {
  MatrixXd others(2, 3);
  others << 1, 0, 1, 0, 1, 1;
  CHECK(lp::separation_slack<double>(others, VectorXd::Zero(2)) > 0.1);
  // Centre of the square is not separable from the corners.
  MatrixXd corners(2, 4);
  corners << 0, 1, 0, 1, 0, 0, 1, 1;
  VectorXd centre(2);
  centre << 0.5, 0.5;
  CHECK(lp::separation_slack<double>(corners, centre) < 1e-12);
}

TEST_CASE("rank") {
  Matrix<Rational> M(3, 3);
  M << Rational(1), Rational(2), Rational(3), Rational(2), Rational(4),
      Rational(6), Rational(0), Rational(1), Rational(1);
  CHECK(lp::rank<Rational>(M) == 2);
  CHECK(lp::rank<double>(MatrixXd::Identity(4, 4)) == 4);
}
