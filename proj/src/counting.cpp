#include "fewlab/counting.hpp"
#include "fewlab/interval.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace fewlab {

SystemGeometry SystemGeometry::of(const std::vector<Support>& supports) {
  SystemGeometry g;
  if (supports.empty()) return g;
  const Eigen::Index n = supports.front().dim();
  Eigen::Index total = 0;
  for (const Support& s : supports) {
    g.polytopes.push_back(hull_vertices(s));
    if (s.size() == 1) g.trivially_empty = true;
    total += s.size() - 1;
  }
  // The sum is full dimensional iff the differences within the supports
  // span R^n.
  MatrixXd diffs(n, std::max<Eigen::Index>(total, 1));
  diffs.setZero();
  Eigen::Index col = 0;
  for (const Support& s : supports)
    for (Eigen::Index k = 1; k < s.size(); ++k)
      diffs.col(col++) = s.points().col(k) - s.points().col(0);
  const double scale = std::max(1.0, diffs.cwiseAbs().maxCoeff());
  Eigen::FullPivLU<MatrixXd> lu(diffs / scale);
  lu.setThreshold(1e-9);
  g.full_dimensional = lu.rank() == n;
  if (g.full_dimensional)
    g.decomposition = minkowski_vertex_decomposition(g.polytopes);
  return g;
}

namespace {

// n <= 3 throughout; fixed storage keeps the inner loop free of allocation.
constexpr int kMaxDim = 3;
using Box = std::array<Interval, kMaxDim>;
using Point = std::array<double, kMaxDim>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                                  kMaxDim, kMaxDim>;

// Exponents and coefficients of one equation in flat arrays.
struct Terms {
  std::vector<std::array<double, kMaxDim>> a;
  std::vector<double> c;
};

std::vector<Terms> flatten(const FewnomialSystem& sys) {
  std::vector<Terms> out(static_cast<std::size_t>(sys.size()));
  for (Eigen::Index i = 0; i < sys.size(); ++i) {
    const MatrixXd& A = sys.supports[i].points();
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      std::array<double, kMaxDim> col{};
      for (Eigen::Index j = 0; j < A.rows(); ++j) col[j] = A(j, k);
      out[i].a.push_back(col);
      out[i].c.push_back(sys.coeffs[i](k));
    }
  }
  return out;
}

// The system on a box with the factor exp(-M_i) removed from equation i,
// M_i = max_a sup <a, X>. Values are then bounded by sum |c|.
struct BoxEval {
  Interval f_mid[kMaxDim];           // at the midpoint
  Interval f_box[kMaxDim];           // naive enclosure
  Interval jac[kMaxDim][kMaxDim];    // enclosure of the scaled Jacobian
};

BoxEval evaluate_box(const std::vector<Terms>& eqs, int n, const Box& X,
                     const Point& m) {
  BoxEval ev;
  for (int i = 0; i < n; ++i) {
    const Terms& t = eqs[i];
    const std::size_t T = t.c.size();
    double M = -std::numeric_limits<double>::infinity();
    Interval dots[64];
    std::vector<Interval> spill;
    Interval* d = T <= 64 ? dots : (spill.resize(T), spill.data());
    for (std::size_t k = 0; k < T; ++k) {
      Interval acc(0.0);
      for (int j = 0; j < n; ++j) acc += Interval(t.a[k][j]) * X[j];
      d[k] = acc;
      M = std::max(M, acc.hi);
    }
    Interval fb(0.0), fm(0.0);
    for (int j = 0; j < n; ++j) ev.jac[i][j] = Interval(0.0);
    for (std::size_t k = 0; k < T; ++k) {
      const Interval e = exp(d[k] - Interval(M));
      Interval dm(0.0);
      for (int j = 0; j < n; ++j) dm += Interval(t.a[k][j]) * Interval(m[j]);
      const Interval em = exp(dm - Interval(M));
      fb += Interval(t.c[k]) * e;
      fm += Interval(t.c[k]) * em;
      for (int j = 0; j < n; ++j)
        ev.jac[i][j] += Interval(t.c[k] * t.a[k][j]) * e;
    }
    ev.f_box[i] = fb;
    ev.f_mid[i] = fm;
  }
  return ev;
}

enum class Verdict { kEmpty, kUnique, kUnknown };

// Krawczyk test on X. On kUnknown, X may be contracted to K(X) & X.
Verdict krawczyk(const BoxEval& ev, int n, Box& X, const Point& m) {
  SmallMatrix Jm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Jm(i, j) = ev.jac[i][j].mid();
  Eigen::FullPivLU<SmallMatrix> lu(Jm);
  if (!lu.isInvertible()) return Verdict::kUnknown;
  const SmallMatrix Y = lu.inverse();
  if (!Y.allFinite()) return Verdict::kUnknown;

  Box K;
  bool inside = true;
  for (int i = 0; i < n; ++i) {
    Interval acc(m[i]);
    for (int k = 0; k < n; ++k) acc = acc - Interval(Y(i, k)) * ev.f_mid[k];
    for (int j = 0; j < n; ++j) {
      // (I - Y J(X))_{ij}
      Interval r(i == j ? 1.0 : 0.0);
      for (int k = 0; k < n; ++k) r = r - Interval(Y(i, k)) * ev.jac[k][j];
      acc += r * (X[j] - Interval(m[j]));
    }
    K[i] = acc;
    if (!X[i].interior_contains(acc)) inside = false;
  }
  if (inside) {
    X = K;
    return Verdict::kUnique;
  }
  Box cut;
  for (int i = 0; i < n; ++i)
    if (!intersect(X[i], K[i], cut[i])) return Verdict::kEmpty;
  // Any box between K & X and X holds the same zeros. A little slack keeps
  // the next test from failing on rounding alone once K is very thin.
  for (int i = 0; i < n; ++i) {
    const double pad = 0.1 * cut[i].width() +
                       1e-15 * std::max(std::abs(cut[i].lo), std::abs(cut[i].hi)) + 1e-300;
    X[i] = Interval(std::max(X[i].lo, cut[i].lo - pad), std::min(X[i].hi, cut[i].hi + pad));
  }
  return Verdict::kUnknown;
}

bool excludes(const BoxEval& ev, int n, const Box& X, const Point& m) {
  for (int i = 0; i < n; ++i) {
    if (!ev.f_box[i].contains_zero()) return true;
    // Mean value form.
    Interval mv = ev.f_mid[i];
    for (int j = 0; j < n; ++j) mv += ev.jac[i][j] * (X[j] - Interval(m[j]));
    if (!mv.contains_zero()) return true;
  }
  return false;
}

Point midpoint(const Box& X, int n) {
  Point m{};
  for (int j = 0; j < n; ++j) m[j] = X[j].mid();
  return m;
}

// Scaled residual and Jacobian at w.
void scaled_system(const FewnomialSystem& sys, const VectorXd& w, VectorXd& f,
                   MatrixXd& J) {
  const Eigen::Index n = sys.dim();
  f.resize(n);
  J.resize(n, n);
  J.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const MatrixXd& A = sys.supports[i].points();
    const VectorXd h = A.transpose() * w;
    const double M = h.maxCoeff();
    double s = 0.0;
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      const double e = sys.coeffs[i](k) * std::exp(h(k) - M);
      s += e;
      J.row(i) += e * A.col(k).transpose();
    }
    f(i) = s;
  }
}

VectorXd newton_in_box(const FewnomialSystem& sys, const Box& X, int n,
                       double tol) {
  VectorXd w(n);
  for (int j = 0; j < n; ++j) w(j) = X[j].mid();
  VectorXd f;
  MatrixXd J;
  for (int it = 0; it < 50; ++it) {
    scaled_system(sys, w, f, J);
    Eigen::FullPivLU<MatrixXd> lu(J);
    if (!lu.isInvertible()) break;
    const VectorXd step = lu.solve(f);
    VectorXd next = w - step;
    for (int j = 0; j < n; ++j) next(j) = std::clamp(next(j), X[j].lo, X[j].hi);
    const double moved = (next - w).norm();
    w = next;
    if (moved <= tol * std::max(1.0, w.norm())) break;
  }
  return w;
}

}  // namespace

CountResult count_multivariate(const FewnomialSystem& sys,
                               const CountOptions& opts,
                               const SystemGeometry* geo) {
  const Eigen::Index n = sys.dim();
  if (n < 2 || n > 3)
    throw std::invalid_argument("count_multivariate: n must be 2 or 3");
  if (sys.size() != n)
    throw std::invalid_argument("count_multivariate: system is not square");
  SystemGeometry local;
  if (!geo) {
    local = SystemGeometry::of(sys.supports);
    geo = &local;
  }
  CountResult res;
  if (geo->trivially_empty || !geo->full_dimensional) return res;
  for (const VectorXd& c : sys.coeffs)
    if ((c.array() == 0.0).all()) {
      res.certified = false;
      res.discarded_degenerate = true;
      return res;
    }

  double R;
  if (opts.fixed_radius) {
    R = *opts.fixed_radius;
  } else {
    const ExclusionRadius ex = exclusion_radius(sys, geo);
    R = ex.radius;
    res.certified = ex.certified;
  }
  R = R * 1.001 + 1e-6;
  res.radius = R;

  struct Item {
    Box X;
    int depth;
  };
  std::vector<Item> stack;
  const int nd = static_cast<int>(n);
  const std::vector<Terms> eqs = flatten(sys);
  Box root;
  for (int j = 0; j < nd; ++j) root[j] = Interval(-R, R);
  stack.push_back({root, 0});
  // Off-centre split so that zeros on lattice points rarely land on a cut.
  constexpr double kSplit = 0.4936;
  while (!stack.empty()) {
    if (++res.boxes > opts.max_boxes) {
      res.certified = false;
      res.discarded_degenerate = true;
      break;
    }
    Item item = stack.back();
    stack.pop_back();
    Box& X = item.X;
    bool resolved = false;
    for (int pass = 0; pass < 3 && !resolved; ++pass) {
      const Point m = midpoint(X, nd);
      const BoxEval ev = evaluate_box(eqs, nd, X, m);
      if (excludes(ev, nd, X, m)) {
        resolved = true;
        break;
      }
      const Box before = X;
      const Verdict v = krawczyk(ev, nd, X, m);
      if (v == Verdict::kEmpty) {
        resolved = true;
      } else if (v == Verdict::kUnique) {
        resolved = true;
        const VectorXd z = newton_in_box(sys, X, nd, opts.newton_tol);
        VectorXd f;
        MatrixXd J;
        scaled_system(sys, z, f, J);
        double norms = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) norms *= J.row(i).norm();
        if (std::abs(J.determinant()) <= opts.degeneracy_tol * norms) {
          res.discarded_degenerate = true;
          res.certified = false;
        } else {
          res.zeros.push_back(z);
          res.max_zero_norm = std::max(res.max_zero_norm, z.norm());
        }
      } else {
        // Keep contracting only while it pays off.
        double shrink = 1.0;
        for (int j = 0; j < nd; ++j)
          if (before[j].width() > 0.0)
            shrink = std::min(shrink, 1.0 - X[j].width() / before[j].width());
        if (shrink < 0.1) break;
      }
    }
    if (resolved) continue;
    if (item.depth >= opts.max_depth) {
      res.certified = false;
      res.discarded_degenerate = true;
      continue;
    }
    int wide = 0;
    for (int j = 1; j < nd; ++j)
      if (X[j].width() > X[wide].width()) wide = j;
    const double cut = X[wide].lo + kSplit * X[wide].width();
    if (!(cut > X[wide].lo && cut < X[wide].hi)) {
      // Unresolved at the resolution of doubles.
      res.certified = false;
      res.discarded_degenerate = true;
      continue;
    }
    Box left = X, right = X;
    left[wide].hi = cut;
    right[wide].lo = cut;
    stack.push_back({left, item.depth + 1});
    stack.push_back({right, item.depth + 1});
  }
  res.count = static_cast<int>(res.zeros.size());
  return res;
}

CountResult count_zeros(const FewnomialSystem& sys, const CountOptions& opts,
                        const SystemGeometry* geo) {
  if (sys.dim() == 1) {
    if (sys.size() != 1)
      throw std::invalid_argument("count_zeros: system is not square");
    return count_univariate(sys.supports[0], sys.coeffs[0], opts);
  }
  return count_multivariate(sys, opts, geo);
}

}  // namespace fewlab
