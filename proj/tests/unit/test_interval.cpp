#include "doctest.h"
#include "fewlab/interval.hpp"
#include "fewlab/types.hpp"

#include <cmath>
#include <random>

using namespace fewlab;

namespace {

bool encloses(const Interval& iv, const Rational& exact) {
  return Rational(iv.lo) <= exact && exact <= Rational(iv.hi);
}

}  // namespace

TEST_CASE("basic operations enclose the exact result") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-60, 60);
  auto draw = [&] { return std::ldexp(mant(rng), expo(rng)); };
  for (int trial = 0; trial < 20000; ++trial) {
    const double a = draw(), b = draw();
    const Rational ra(a), rb(b);
    CHECK(encloses(Interval(a) + Interval(b), ra + rb));
    CHECK(encloses(Interval(a) - Interval(b), ra - rb));
    CHECK(encloses(Interval(a) * Interval(b), ra * rb));
    const Interval wide(std::min(a, b), std::max(a, b));
    CHECK(encloses(wide * Interval(b), Rational(wide.lo) * rb));
    CHECK(encloses(wide * Interval(b), Rational(wide.hi) * rb));
  }
}

TEST_CASE("interval helpers") {
  const Interval a(-1.0, 2.0);
  CHECK(a.contains_zero());
  CHECK(a.mig() == 0.0);
  CHECK(a.mag() == 2.0);
  CHECK(Interval(0.5, 3.0).mig() == 0.5);
  CHECK(Interval(-3.0, 3.0).interior_contains(Interval(-1.0, 1.0)));
  CHECK_FALSE(Interval(-3.0, 3.0).interior_contains(Interval(-3.0, 1.0)));
  Interval out;
  CHECK_FALSE(intersect(Interval(0.0, 1.0), Interval(2.0, 3.0), out));
  CHECK(intersect(Interval(0.0, 2.0), Interval(1.0, 3.0), out));
  CHECK(out.lo == 1.0);
  CHECK(out.hi == 2.0);
  const Interval e = exp(Interval(-1.0, 1.0));
  CHECK(e.lo < std::exp(-1.0));
  CHECK(e.hi > std::exp(1.0));
  CHECK(exp(Interval(-800.0, -700.0)).lo == 0.0);
}
