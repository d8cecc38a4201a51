#include "fewlab/counting.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace fewlab {

namespace {

// Exponential sum sum_k c_k exp(a_k w) with sorted, distinct exponents and
// nonzero coefficients.
struct Terms {
  std::vector<double> a;
  std::vector<double> c;
  std::size_t size() const { return a.size(); }
};

Terms make_terms(const Support& s, const VectorXd& c) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(s.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return s.points()(0, i) < s.points()(0, j);
  });
  Terms t;
  for (std::size_t i : idx) {
    if (c(i) == 0.0) continue;
    t.a.push_back(s.points()(0, i));
    t.c.push_back(c(i));
  }
  return t;
}

struct Value {
  double mant = 0.0;   // f(w) exp(-M)
  double scale = 0.0;  // sum |c_k| exp(a_k w - M)
  double deriv = 0.0;  // f'(w) exp(-M)
};

Value evaluate(const Terms& t, double w) {
  double m = -std::numeric_limits<double>::infinity();
  for (double a : t.a) m = std::max(m, a * w);
  Value v;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double e = std::exp(t.a[k] * w - m);
    v.mant += t.c[k] * e;
    v.scale += std::abs(t.c[k]) * e;
    v.deriv += t.c[k] * t.a[k] * e;
  }
  return v;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

struct Roots {
  std::vector<double> z;
  bool degenerate = false;
};

// Root of t on [lo, hi] where the signs at the ends differ.
double refine(const Terms& t, double lo, double hi, int sign_lo, double tol) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const Value v = evaluate(t, x);
    const int s = sign_of(v.mant);
    if (s == 0) return x;
    if (s == sign_lo)
      lo = x;
    else
      hi = x;
    if (hi - lo <= tol * std::max(1.0, std::abs(x))) break;
    // Newton step, accepted only inside the bracket.
    double next = v.deriv != 0.0 ? x - v.mant / v.deriv : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 0.25 * tol * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

// Moves away from `from` in direction dir until the sign equals `want`.
double bracket(const Terms& t, double from, int dir, int want, double step) {
  for (int it = 0; it < 2000; ++it) {
    const double x = from + dir * step;
    if (sign_of(evaluate(t, x).mant) == want) return x;
    step *= 2.0;
    if (!std::isfinite(step) || step > 1e300) break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Roots roots(const Terms& t, const CountOptions& opts) {
  Roots r;
  const std::size_t n = t.size();
  if (n <= 1) return r;
  if (n == 2) {
    const double q = -t.c[0] / t.c[1];
    if (q > 0.0) r.z.push_back(std::log(q) / (t.a[1] - t.a[0]));
    return r;
  }
  // Critical points: zeros of d/dw [f exp(-a_0 w)], one term fewer.
  Terms d;
  for (std::size_t k = 1; k < n; ++k) {
    d.a.push_back(t.a[k] - t.a[0]);
    d.c.push_back(t.c[k] * (t.a[k] - t.a[0]));
  }
  Roots crit = roots(d, opts);
  r.degenerate = crit.degenerate;

  const double spread = t.a.back() - t.a.front();
  const double step = 1.0 / spread;
  const int sign_minus = sign_of(t.c.front());
  const int sign_plus = sign_of(t.c.back());

  std::vector<int> crit_sign;
  for (double z : crit.z) {
    const Value v = evaluate(t, z);
    if (std::abs(v.mant) <= opts.degeneracy_tol * v.scale) r.degenerate = true;
    crit_sign.push_back(sign_of(v.mant));
  }

  const std::size_t m = crit.z.size();
  if (m == 0) {
    if (sign_minus == sign_plus) return r;
    const int s0 = sign_of(evaluate(t, 0.0).mant);
    double lo, hi;
    if (s0 == 0) {
      r.z.push_back(0.0);
      return r;
    }
    if (s0 == sign_minus) {
      lo = 0.0;
      hi = bracket(t, 0.0, +1, sign_plus, step);
    } else {
      hi = 0.0;
      lo = bracket(t, 0.0, -1, sign_minus, step);
    }
    if (std::isnan(lo) || std::isnan(hi)) {
      r.degenerate = true;
      return r;
    }
    r.z.push_back(refine(t, lo, hi, sign_minus, opts.newton_tol));
    return r;
  }

  // (-inf, z_1)
  if (crit_sign[0] != 0 && crit_sign[0] != sign_minus) {
    const double lo = bracket(t, crit.z[0], -1, sign_minus, step);
    if (std::isnan(lo))
      r.degenerate = true;
    else
      r.z.push_back(refine(t, lo, crit.z[0], sign_minus, opts.newton_tol));
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    if (crit_sign[j] == 0 || crit_sign[j + 1] == 0) continue;
    if (crit_sign[j] != crit_sign[j + 1])
      r.z.push_back(refine(t, crit.z[j], crit.z[j + 1], crit_sign[j],
                           opts.newton_tol));
  }
  // (z_m, inf)
  if (crit_sign[m - 1] != 0 && crit_sign[m - 1] != sign_plus) {
    const double hi = bracket(t, crit.z[m - 1], +1, sign_plus, step);
    if (std::isnan(hi))
      r.degenerate = true;
    else
      r.z.push_back(
          refine(t, crit.z[m - 1], hi, crit_sign[m - 1], opts.newton_tol));
  }
  for (int s : crit_sign)
    if (s == 0) r.degenerate = true;
  return r;
}

}  // namespace

CountResult count_univariate(const Support& s, const VectorXd& c,
                             const CountOptions& opts) {
  if (s.dim() != 1)
    throw std::invalid_argument("count_univariate: support must be in R^1");
  if (c.size() != s.size())
    throw std::invalid_argument("count_univariate: coefficient count");
  const Terms t = make_terms(s, c);
  CountResult res;
  if (t.size() == 0) {
    // Identically zero: every point is a degenerate zero.
    res.certified = false;
    res.discarded_degenerate = true;
    return res;
  }
  const Roots r = roots(t, opts);
  for (double z : r.z) {
    res.zeros.push_back(VectorXd::Constant(1, z));
    res.max_zero_norm = std::max(res.max_zero_norm, std::abs(z));
  }
  res.count = static_cast<int>(r.z.size());
  res.discarded_degenerate = r.degenerate;
  res.certified = !r.degenerate;
  return res;
}

double ek_density(const Support& s, double w) {
  const auto a = s.points().row(0);
  const double x = 2.0 * w;
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < a.size(); ++k) m = std::max(m, a(k) * x);
  double z = 0.0, mean = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double p = std::exp(a(k) * x - m);
    z += p;
    mean += p * a(k);
  }
  mean /= z;
  double var = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = a(k) - mean;
    var += std::exp(a(k) * x - m) * d * d;
  }
  return std::sqrt(var / z) / std::numbers::pi;
}

double ek_expected_univariate(const Support& s) {
  if (s.dim() != 1)
    throw std::invalid_argument("ek_expected_univariate: support must be in R^1");
  const Eigen::Index t = s.size();
  if (t == 1) return 0.0;
  std::vector<double> a(s.points().data(), s.points().data() + t);
  std::sort(a.begin(), a.end());
  // The density is at most (1/pi) sum_k d_k exp(-d_k |w|) with d_k the
  // distances to the extreme exponent on the relevant side, so the mass
  // beyond W is at most (1/pi) sum_k exp(-d_k W) per side.
  const double gap = std::min(a[1] - a[0], a[t - 1] - a[t - 2]);
  const double tail_target = 1e-12;
  const double W = std::log(static_cast<double>(t - 1) /
                            (std::numbers::pi * tail_target)) /
                   gap;
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double w) { return ek_density(s, w); };
  const int pieces = 64;
  double total = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double lo = -W + 2.0 * W * k / pieces;
    const double hi = -W + 2.0 * W * (k + 1) / pieces;
    total += gauss_kronrod<double, 15>::integrate(f, lo, hi, 20, 1e-12);
  }
  return total;
}

}  // namespace fewlab
