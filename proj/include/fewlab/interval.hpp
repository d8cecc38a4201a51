#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

// Closed intervals with outward rounding. Each operation is computed in
// round-to-nearest and then moved outward by |x| 2^-52 (at least one ulp)
// plus the smallest subnormal, which encloses the exact result of the
// correctly rounded basic operations. exp is widened a little more to
// cover libm error.

namespace fewlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  constexpr Interval(double x) : lo(x), hi(x) {}  // NOLINT: implicit on purpose
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
  double mig() const {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
  }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
  bool interior_contains(const Interval& o) const {
    return lo < o.lo && o.hi < hi;
  }
};

namespace interval_detail {
constexpr double kUlp = 0x1p-52;
constexpr double kTiny = std::numeric_limits<double>::denorm_min();
inline double down(double x) { return x - (std::abs(x) * kUlp + kTiny); }
inline double up(double x) { return x + (std::abs(x) * kUlp + kTiny); }
}  // namespace interval_detail

inline Interval operator+(const Interval& a, const Interval& b) {
  using namespace interval_detail;
  return {down(a.lo + b.lo), up(a.hi + b.hi)};
}

inline Interval operator-(const Interval& a, const Interval& b) {
  using namespace interval_detail;
  return {down(a.lo - b.hi), up(a.hi - b.lo)};
}

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
  using namespace interval_detail;
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  double lo = p[0], hi = p[0];
  for (double v : p) {
    // 0 * inf never arises here: all operands are finite.
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {down(lo), up(hi)};
}

inline Interval& operator+=(Interval& a, const Interval& b) {
  return a = a + b;
}

inline Interval exp(const Interval& a) {
  using namespace interval_detail;
  constexpr double kRel = 4e-16;
  const double l = std::exp(a.lo);
  const double h = std::exp(a.hi);
  return {std::max(0.0, down(l - kRel * l)), up(h + kRel * h)};
}

inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

/// Empty intersection is reported through the return flag.
inline bool intersect(const Interval& a, const Interval& b, Interval& out) {
  out = {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  return out.lo <= out.hi;
}

}  // namespace fewlab
