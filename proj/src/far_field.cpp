// Exclusion radius: beyond it some equation has one term that outweighs
// all the others, so the system cannot vanish.
//
// n = 2 is certified. Directions are split into arcs on which a fixed
// vertex term of one equation stays the unique maximizer, giving a bound
// from the smallest exponent gap on the arc. Directions that are edge
// normals of both Newton polygons get a wedge of their own, handled
// through the two face polynomials.

#include "fewlab/counting.hpp"
#include "fewlab/interval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace fewlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRadiusMax = 200.0;
constexpr double kTieTol = 1e-9;

Eigen::Vector2d dir(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Smallest R >= 0 with sum_k mags_k exp(-R gaps_k) <= lead (1 - 1e-9).
// Gaps must be positive. Infinity when no such R below kRadiusMax.
// The left side is convex and decreasing in R, so Newton from R = 0 stays
// below the root; the returned value is checked to be on the safe side.
double dominance_radius(double lead, const std::vector<double>& mags,
                        const std::vector<double>& gaps) {
  const double target = lead * (1.0 - 1e-9);
  double R = 0.0;
  for (int it = 0; it < 100; ++it) {
    double f = -target, df = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k) {
      const double e = mags[k] * std::exp(-R * gaps[k]);
      f += e;
      df -= gaps[k] * e;
    }
    if (f <= 0.0) return R;
    if (R > kRadiusMax) break;
    const double step = -f / df;
    R += std::max(step, 1e-12 * std::max(1.0, R));
    if (step <= 1e-10 * std::max(1.0, R)) R *= 1.0 + 1e-9;
  }
  return std::numeric_limits<double>::infinity();
}

struct Equation {
  MatrixXd pts;  // 2 x t
  VectorXd mag;  // |c|
};

// Minimum of <d, u(theta)> over theta in [ta, tb].
double min_on_arc(const Eigen::Vector2d& d, double ta, double tb) {
  double m = std::min(d.dot(dir(ta)), d.dot(dir(tb)));
  const double phi = std::atan2(d.y(), d.x()) + kPi;  // minimizing angle
  // Is phi (mod 2 pi) inside [ta, tb]?
  double p = phi;
  while (p < ta) p += 2.0 * kPi;
  while (p - 2.0 * kPi >= ta) p -= 2.0 * kPi;
  if (p <= tb) m = std::min(m, -d.norm());
  return m;
}

// Radius for which equation eq dominates on the whole arc, or infinity.
double arc_radius(const Equation& eq, double ta, double tb) {
  const Eigen::Vector2d um = dir(0.5 * (ta + tb));
  const VectorXd h = eq.pts.transpose() * um;
  Eigen::Index star;
  h.maxCoeff(&star);
  std::vector<double> mags, gaps;
  for (Eigen::Index k = 0; k < eq.pts.cols(); ++k) {
    if (k == star) continue;
    const Eigen::Vector2d d = eq.pts.col(star) - eq.pts.col(k);
    const double g = min_on_arc(d, ta, tb);
    if (!(g > 0.0)) return std::numeric_limits<double>::infinity();
    mags.push_back(eq.mag(k));
    gaps.push_back(g);
  }
  if (mags.empty()) return 0.0;
  return dominance_radius(eq.mag(star), mags, gaps);
}

struct Critical {
  double theta;
  bool eq[2] = {false, false};
};

// Angles of outer edge normals of conv(pts).
std::vector<double> critical_angles(const Polytope& poly, const MatrixXd& pts) {
  std::vector<double> out;
  const Eigen::Index nv = poly.num_vertices();
  const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < nv; ++j)
    for (Eigen::Index k = j + 1; k < nv; ++k) {
      const Eigen::Vector2d e = poly.vertices.col(k) - poly.vertices.col(j);
      Eigen::Vector2d n(e.y(), -e.x());
      n.normalize();
      for (int sgn : {1, -1}) {
        const Eigen::Vector2d u = sgn * n;
        const VectorXd h = pts.transpose() * u;
        const double top = h.maxCoeff();
        const double hj = poly.vertices.col(j).dot(u);
        const double hk = poly.vertices.col(k).dot(u);
        if (hj >= top - kTieTol * scale && hk >= top - kTieTol * scale)
          out.push_back(std::atan2(u.y(), u.x()));
      }
    }
  return out;
}

// Face data of one equation in direction u0.
struct Face {
  std::vector<double> beta;  // <a, u_perp> on the face
  std::vector<double> coef;  // signed coefficients on the face
  std::vector<double> off_gap, off_eta, off_mag;
  double beta_min = 0.0, beta_max = 0.0;
  double c_at_min = 0.0, c_at_max = 0.0;
};

Face face_data(const Equation& eq, const VectorXd& coef,
               const Eigen::Vector2d& u0) {
  const Eigen::Vector2d up(-u0.y(), u0.x());
  const VectorXd h = eq.pts.transpose() * u0;
  const double top = h.maxCoeff();
  const double scale = std::max(1.0, eq.pts.cwiseAbs().maxCoeff());
  Face f;
  std::vector<double> off_beta;
  for (Eigen::Index k = 0; k < eq.pts.cols(); ++k) {
    const double b = eq.pts.col(k).dot(up);
    if (h(k) >= top - kTieTol * scale) {
      f.beta.push_back(b);
      f.coef.push_back(coef(k));
    } else {
      f.off_gap.push_back(top - h(k));
      off_beta.push_back(b);
      f.off_mag.push_back(std::abs(coef(k)));
    }
  }
  const auto mm = std::minmax_element(f.beta.begin(), f.beta.end());
  f.beta_min = *mm.first;
  f.beta_max = *mm.second;
  f.c_at_min = f.coef[mm.first - f.beta.begin()];
  f.c_at_max = f.coef[mm.second - f.beta.begin()];
  for (double b : off_beta)
    f.off_eta.push_back(
        std::max(std::abs(b - f.beta_max), std::abs(b - f.beta_min)));
  return f;
}

// Normalized face polynomial on an s-interval contained in [0, inf) or
// (-inf, 0].
Interval face_poly(const Face& f, const Interval& s, bool positive) {
  const double ref = positive ? f.beta_max : f.beta_min;
  Interval acc(0.0);
  for (std::size_t k = 0; k < f.beta.size(); ++k)
    acc += Interval(f.coef[k]) * exp(s * Interval(f.beta[k] - ref));
  return acc;
}

// Lower bound on |normalized face polynomial| for all s beyond +-S.
double tail_floor(const Face& f, double S, bool positive) {
  const double lead = std::abs(positive ? f.c_at_max : f.c_at_min);
  double rest = 0.0;
  for (std::size_t k = 0; k < f.beta.size(); ++k) {
    const double d = positive ? f.beta_max - f.beta[k] : f.beta[k] - f.beta_min;
    if (d > 0.0) rest += std::abs(f.coef[k]) * std::exp(-S * d);
  }
  return lead - rest;
}

// True if the two face polynomials are never simultaneously within eps.
bool faces_separated(const Face (&f)[2], const double (&eps)[2]) {
  for (bool positive : {true, false}) {
    // Far tail first.
    double S = 1.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (const Face& fi : f)
      for (double b : fi.beta) {
        const double d = positive ? fi.beta_max - b : b - fi.beta_min;
        if (d > 0.0) dmin = std::min(dmin, d);
      }
    if (std::isfinite(dmin)) S = 1.0 / dmin;
    bool tail_ok = false;
    for (int it = 0; it < 60 && !tail_ok; ++it, S *= 2.0)
      for (int i = 0; i < 2; ++i)
        if (tail_floor(f[i], S, positive) > eps[i]) tail_ok = true;
    if (!tail_ok) return false;
    S /= 2.0;  // last S that worked (loop doubled once more)
    struct Item {
      Interval s;
      int depth;
    };
    std::vector<Item> stack = {{positive ? Interval(0.0, S) : Interval(-S, 0.0), 0}};
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      bool ok = false;
      for (int i = 0; i < 2 && !ok; ++i)
        ok = face_poly(f[i], it.s, positive).mig() > eps[i];
      if (ok) continue;
      if (it.depth >= 40) return false;
      const double m = it.s.mid();
      stack.push_back({Interval(it.s.lo, m), it.depth + 1});
      stack.push_back({Interval(m, it.s.hi), it.depth + 1});
    }
  }
  return true;
}

struct Wedge {
  double theta;
  double alpha;
  double radius;
  bool certified;
};

Wedge bad_direction_wedge(const Equation (&eqs)[2], const VectorXd (&coef)[2],
                          double theta, double alpha_cap) {
  const Eigen::Vector2d u0 = dir(theta);
  const Face f[2] = {face_data(eqs[0], coef[0], u0),
                     face_data(eqs[1], coef[1], u0)};
  double tan_alpha = std::tan(alpha_cap);
  for (const Face& fi : f)
    for (std::size_t k = 0; k < fi.off_gap.size(); ++k)
      if (fi.off_eta[k] > 0.0)
        tan_alpha = std::min(tan_alpha, fi.off_gap[k] / (2.0 * fi.off_eta[k]));
  const double alpha = std::atan(tan_alpha);
  const double cos_a = std::cos(alpha);

  auto passes = [&](double rho0) {
    double eps[2];
    for (int i = 0; i < 2; ++i) {
      eps[i] = 0.0;
      for (std::size_t k = 0; k < f[i].off_gap.size(); ++k)
        eps[i] += f[i].off_mag[k] * std::exp(-rho0 * f[i].off_gap[k] / 2.0);
    }
    return faces_separated(f, eps);
  };
  const double rho_max = kRadiusMax * cos_a;
  if (!passes(rho_max)) return {theta, alpha, kRadiusMax, false};
  double lo = 0.0, hi = rho_max;
  if (passes(0.0)) {
    hi = 0.0;
  } else {
    for (int it = 0; it < 30 && hi - lo > 1e-3 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (passes(mid) ? hi : lo) = mid;
    }
  }
  return {theta, alpha, hi / cos_a, true};
}

ExclusionRadius exclusion_radius_2d(const FewnomialSystem& sys,
                                    const SystemGeometry& geo) {
  Equation eqs[2];
  VectorXd coef[2];
  for (int i = 0; i < 2; ++i) {
    eqs[i].pts = sys.supports[i].points();
    eqs[i].mag = sys.coeffs[i].cwiseAbs();
    coef[i] = sys.coeffs[i];
  }

  // Merge critical angles of both equations.
  std::vector<Critical> crit;
  for (int i = 0; i < 2; ++i)
    for (double th : critical_angles(geo.polytopes[i], eqs[i].pts)) {
      bool merged = false;
      for (auto& c : crit) {
        double d = std::remainder(c.theta - th, 2.0 * kPi);
        if (std::abs(d) < 1e-12) {
          c.eq[i] = true;
          merged = true;
        }
      }
      if (!merged) {
        Critical c{th};
        c.eq[i] = true;
        crit.push_back(c);
      }
    }
  std::sort(crit.begin(), crit.end(),
            [](const Critical& a, const Critical& b) { return a.theta < b.theta; });
  const std::size_t K = crit.size();
  if (K == 0) throw std::logic_error("exclusion_radius: no critical directions");

  auto gap_to = [&](std::size_t k, int step) {
    const std::size_t j = (k + K + step) % K;
    double d = step > 0 ? crit[j].theta - crit[k].theta
                        : crit[k].theta - crit[j].theta;
    if (d <= 0.0) d += 2.0 * kPi;
    return d;
  };

  ExclusionRadius out{0.0, true};
  std::vector<double> half_width(K, 0.0);  // wedge half-angle at bad angles
  for (std::size_t k = 0; k < K; ++k) {
    if (!(crit[k].eq[0] && crit[k].eq[1])) continue;
    const double cap =
        std::min({0.25, 0.45 * gap_to(k, 1), 0.45 * gap_to(k, -1)});
    const Wedge w = bad_direction_wedge(eqs, coef, crit[k].theta, cap);
    half_width[k] = w.alpha;
    out.radius = std::max(out.radius, w.radius);
    out.certified = out.certified && w.certified;
  }

  // Elementary arcs between consecutive critical angles, split at the
  // midpoint, minus the wedges.
  struct Arc {
    double ta, tb;
    double radius;
    int splits;
    bool operator<(const Arc& o) const { return radius < o.radius; }
  };
  auto arc_r = [&](double ta, double tb) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
      // Valid only if no critical angle of equation i lies in [ta, tb].
      bool valid = true;
      for (const auto& c : crit) {
        if (!c.eq[i]) continue;
        double p = c.theta;
        while (p < ta - 1e-15) p += 2.0 * kPi;
        while (p - 2.0 * kPi >= ta - 1e-15) p -= 2.0 * kPi;
        if (p <= tb + 1e-15) valid = false;
      }
      if (valid) best = std::min(best, arc_radius(eqs[i], ta, tb));
    }
    return best;
  };
  std::priority_queue<Arc> arcs;
  for (std::size_t k = 0; k < K; ++k) {
    const double t0 = crit[k].theta;
    const double t1 = t0 + gap_to(k, 1);
    const double mid = 0.5 * (t0 + t1);
    const double a0 = t0 + half_width[k];
    const double a1 = t1 - half_width[(k + 1) % K];
    if (a0 < mid) arcs.push({a0, mid, arc_r(a0, mid), 0});
    if (mid < a1) arcs.push({mid, a1, arc_r(mid, a1), 0});
  }
  // Refine the worst arc while it helps.
  std::vector<Arc> done;
  for (int it = 0; it < 200 && !arcs.empty(); ++it) {
    Arc a = arcs.top();
    if (a.radius <= out.radius || a.splits >= 10) break;
    arcs.pop();
    const double m = 0.5 * (a.ta + a.tb);
    Arc l{a.ta, m, arc_r(a.ta, m), a.splits + 1};
    Arc r{m, a.tb, arc_r(m, a.tb), a.splits + 1};
    if (std::max(l.radius, r.radius) >= 0.98 * a.radius) {
      done.push_back(a);  // limited by an endpoint; splitting is futile
      continue;
    }
    arcs.push(l);
    arcs.push(r);
  }
  while (!arcs.empty()) {
    done.push_back(arcs.top());
    arcs.pop();
  }
  for (const Arc& a : done) {
    if (!std::isfinite(a.radius) || a.radius > kRadiusMax) {
      out.radius = kRadiusMax;
      out.certified = false;
      continue;
    }
    out.radius = std::max(out.radius, a.radius);
  }
  return out;
}

// n = 3: the sphere of directions is covered by patches of the cube
// surface, projected radially. On a patch, an equation whose maximizing
// term stays unique gives a dominance radius from lower bounds on the
// gaps. Patches are split until some equation works everywhere.
struct Patch {
  int axis;      // face normal is sgn * e_axis
  double sgn;
  double s0, s1, t0, t1;
  double radius;
  int depth;
  bool operator<(const Patch& o) const { return radius < o.radius; }
};

Eigen::Vector3d patch_point(const Patch& p, double s, double t) {
  Eigen::Vector3d v;
  v(p.axis) = p.sgn;
  v((p.axis + 1) % 3) = s;
  v((p.axis + 2) % 3) = t;
  return v;
}

// Lower bound of <d, v / |v|> over the patch, or -1 if not positive.
double patch_gap(const Patch& p, const Eigen::Vector3d& d) {
  double lin = std::numeric_limits<double>::infinity();
  double far = 0.0;
  for (double s : {p.s0, p.s1})
    for (double t : {p.t0, p.t1}) {
      const Eigen::Vector3d v = patch_point(p, s, t);
      lin = std::min(lin, d.dot(v));
      far = std::max(far, v.norm());
    }
  if (!(lin > 0.0)) return -1.0;
  return lin / far * (1.0 - 1e-12);
}

double patch_radius(const FewnomialSystem& sys, const Patch& p) {
  const Eigen::Vector3d centre =
      patch_point(p, 0.5 * (p.s0 + p.s1), 0.5 * (p.t0 + p.t1)).normalized();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < 3; ++i) {
    const MatrixXd& A = sys.supports[i].points();
    const VectorXd h = A.transpose() * centre;
    Eigen::Index star;
    h.maxCoeff(&star);
    std::vector<double> mags, gaps;
    bool ok = true;
    for (Eigen::Index k = 0; k < A.cols() && ok; ++k) {
      if (k == star) continue;
      const double g = patch_gap(p, A.col(star) - A.col(k));
      if (g <= 0.0) ok = false;
      mags.push_back(std::abs(sys.coeffs[i](k)));
      gaps.push_back(g);
    }
    if (!ok) continue;
    const double lead = std::abs(sys.coeffs[i](star));
    best = std::min(best, mags.empty() ? 0.0 : dominance_radius(lead, mags, gaps));
  }
  return best;
}

ExclusionRadius exclusion_radius_3d(const FewnomialSystem& sys) {
  std::priority_queue<Patch> open;
  for (int axis = 0; axis < 3; ++axis)
    for (double sgn : {1.0, -1.0}) {
      Patch p{axis, sgn, -1.0, 1.0, -1.0, 1.0, 0.0, 0};
      p.radius = patch_radius(sys, p);
      open.push(p);
    }
  constexpr int kMaxDepth = 16;
  constexpr int kBudget = 4000;
  bool certified = true;
  double resolved_max = 0.0;
  double floor = 0.0;  // radius of patches that cannot improve
  for (int it = 0; it < kBudget && !open.empty(); ++it) {
    const Patch p = open.top();
    if (p.radius <= floor) break;
    open.pop();
    if (p.depth >= kMaxDepth) {
      if (std::isfinite(p.radius)) {
        floor = std::max(floor, p.radius);
      } else {
        certified = false;
      }
      continue;
    }
    const double sm = 0.5 * (p.s0 + p.s1), tm = 0.5 * (p.t0 + p.t1);
    Patch kids[4] = {{p.axis, p.sgn, p.s0, sm, p.t0, tm, 0.0, p.depth + 1},
                     {p.axis, p.sgn, sm, p.s1, p.t0, tm, 0.0, p.depth + 1},
                     {p.axis, p.sgn, p.s0, sm, tm, p.t1, 0.0, p.depth + 1},
                     {p.axis, p.sgn, sm, p.s1, tm, p.t1, 0.0, p.depth + 1}};
    double worst = 0.0;
    for (Patch& k : kids) {
      k.radius = patch_radius(sys, k);
      worst = std::max(worst, k.radius);
    }
    if (std::isfinite(p.radius) && worst >= 0.98 * p.radius) {
      // Limited by the patch geometry itself; keep the parent bound.
      floor = std::max(floor, p.radius);
      continue;
    }
    for (const Patch& k : kids) open.push(k);
  }
  while (!open.empty()) {
    const Patch p = open.top();
    open.pop();
    if (std::isfinite(p.radius))
      resolved_max = std::max(resolved_max, p.radius);
    else
      certified = false;
  }
  resolved_max = std::max(resolved_max, floor);
  if (certified && resolved_max <= kRadiusMax) return {resolved_max, true};
  // Some direction is critical for every equation at once.
  return {std::min(1.5 * resolved_max + 0.5, 50.0), false};
}

}  // namespace

ExclusionRadius exclusion_radius(const FewnomialSystem& sys,
                                 const SystemGeometry* geo) {
  const Eigen::Index n = sys.dim();
  SystemGeometry local;
  if (!geo) {
    local = SystemGeometry::of(sys.supports);
    geo = &local;
  }
  if (geo->trivially_empty) return {0.0, true};
  if (!geo->full_dimensional)
    throw DegenerateFanError(
        "exclusion_radius: Minkowski sum is lower dimensional; the system "
        "has no nondegenerate zeros");
  if (n == 1) {
    // Both ends of the line: extreme terms dominate.
    const auto a = sys.supports[0].points().row(0);
    const VectorXd& c = sys.coeffs[0];
    double R = 0.0;
    for (int sgn : {1, -1}) {
      Eigen::Index star;
      const double top = (sgn * a.transpose()).maxCoeff(&star);
      std::vector<double> mags, gaps;
      for (Eigen::Index k = 0; k < a.size(); ++k)
        if (k != star) {
          mags.push_back(std::abs(c(k)));
          gaps.push_back(top - sgn * a(k));
        }
      R = std::max(R, dominance_radius(std::abs(c(star)), mags, gaps));
    }
    if (!std::isfinite(R)) return {kRadiusMax, false};
    return {R, true};
  }
  if (n == 2) return exclusion_radius_2d(sys, *geo);
  if (n == 3) return exclusion_radius_3d(sys);
  throw std::invalid_argument("exclusion_radius: n must be 1, 2 or 3");
}

}  // namespace fewlab
