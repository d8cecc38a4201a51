#pragma once

#include "fewlab/types.hpp"

#include <optional>
#include <vector>

// Dense two-phase simplex for the small linear programs that show up in
// vertex tests, sum-vertex separation and cone membership. Pivoting uses
// Bland's rule, so the method terminates for exact scalars as well.

namespace fewlab::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

template <typename Scalar>
struct Solution {
  Status status = Status::kInfeasible;
  Scalar objective{0};
  Vector<Scalar> x;
};

namespace detail {

template <typename Scalar>
class Tableau {
 public:
  Tableau(Matrix<Scalar> table, std::vector<int> basis)
      : t_(std::move(table)), basis_(std::move(basis)) {}

  Matrix<Scalar>& table() { return t_; }
  const std::vector<int>& basis() const { return basis_; }

  // Maximizes the objective stored in the last row (as z - c^T x = rhs).
  // Columns with allowed[j] == false never enter the basis.
  Status optimize(const std::vector<bool>& allowed) {
    const Scalar eps = Tolerance<Scalar>::eps();
    const Eigen::Index rows = t_.rows() - 1;
    const Eigen::Index rhs = t_.cols() - 1;
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < rhs; ++j) {
        if (allowed[j] && t_(rows, j) < -eps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::kOptimal;

      Eigen::Index leave = -1;
      Scalar best{0};
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (t_(i, enter) > eps) {
          Scalar ratio = t_(i, rhs) / t_(i, enter);
          if (leave < 0 || ratio < best ||
              (ratio == best && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return Status::kUnbounded;
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const Scalar p = t_(r, c);
    t_.row(r) /= p;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const Scalar f = t_(i, c);
      if (f != Scalar(0)) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = static_cast<int>(c);
  }

 private:
  Matrix<Scalar> t_;
  std::vector<int> basis_;
};

}  // namespace detail

/// Maximizes c^T x subject to A x <= b and x >= 0.
template <typename Scalar>
Solution<Scalar> maximize(const Matrix<Scalar>& A, const Vector<Scalar>& b,
                          const Vector<Scalar>& c) {
  const Scalar eps = Tolerance<Scalar>::eps();
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();

  std::vector<Eigen::Index> negative_rows;
  for (Eigen::Index i = 0; i < m; ++i)
    if (b(i) < Scalar(0)) negative_rows.push_back(i);
  const Eigen::Index k = static_cast<Eigen::Index>(negative_rows.size());

  // Columns: x (n) | slack (m) | artificial (k) | rhs.
  const Eigen::Index cols = n + m + k + 1;
  Matrix<Scalar> t = Matrix<Scalar>::Zero(m + 1, cols);
  std::vector<int> basis(m);
  Eigen::Index art = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool neg = b(i) < Scalar(0);
    const Scalar sign = neg ? Scalar(-1) : Scalar(1);
    t.row(i).head(n) = sign * A.row(i);
    t(i, n + i) = sign;
    t(i, cols - 1) = sign * b(i);
    if (neg) {
      t(i, n + m + art) = Scalar(1);
      basis[i] = static_cast<int>(n + m + art);
      ++art;
    } else {
      basis[i] = static_cast<int>(n + i);
    }
  }

  detail::Tableau<Scalar> tab(std::move(t), std::move(basis));
  std::vector<bool> allowed(cols - 1, true);

  if (k > 0) {
    // Phase one: maximize -(sum of artificials).
    auto& tt = tab.table();
    tt.row(m).setZero();
    for (Eigen::Index j = 0; j < k; ++j) tt(m, n + m + j) = Scalar(1);
    for (Eigen::Index i : negative_rows) tt.row(m) -= tt.row(i);
    tab.optimize(allowed);
    if (tt(m, cols - 1) < -eps) return {Status::kInfeasible, Scalar(0), {}};
    // Drive zero-level artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis()[i] >= n + m) {
        for (Eigen::Index j = 0; j < n + m; ++j) {
          if (tt(i, j) > eps || tt(i, j) < -eps) {
            tab.pivot(i, j);
            break;
          }
        }
      }
    }
    for (Eigen::Index j = n + m; j < n + m + k; ++j) allowed[j] = false;
  }

  // Phase two objective row, expressed in terms of the nonbasic columns.
  auto& tt = tab.table();
  tt.row(m).setZero();
  tt.row(m).head(n) = -c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const int bj = tab.basis()[i];
    const Scalar f = tt(m, bj);
    if (f != Scalar(0)) tt.row(m) -= f * tt.row(i);
  }
  const Status st = tab.optimize(allowed);
  if (st == Status::kUnbounded) return {Status::kUnbounded, Scalar(0), {}};

  Solution<Scalar> sol;
  sol.status = Status::kOptimal;
  sol.x = Vector<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int bj = tab.basis()[i];
    if (bj < n) sol.x(bj) = tt(i, cols - 1);
  }
  sol.objective = tt(m, cols - 1);
  return sol;
}

template <typename Scalar>
struct Separation {
  Scalar slack{0};
  Vector<Scalar> omega;  // empty unless slack > 0
};

/// Largest s such that <p - anchor, omega> >= s for every column p of
/// `others`, over omega in [-1, 1]^d and s in [0, 1]. A positive value
/// certifies that `anchor` is the unique minimizer of some linear
/// functional over {anchor} union others.
template <typename Scalar>
Separation<Scalar> separation(const Matrix<Scalar>& others,
                              const Vector<Scalar>& anchor) {
  const Eigen::Index d = anchor.size();
  const Eigen::Index m = others.cols();
  if (m == 0) return {Scalar(1), Vector<Scalar>::Zero(d)};
  // Variables: omega+ (d), omega- (d), s (1).
  const Eigen::Index nv = 2 * d + 1;
  Matrix<Scalar> A = Matrix<Scalar>::Zero(m + nv, nv);
  Vector<Scalar> b = Vector<Scalar>::Zero(m + nv);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Vector<Scalar> diff = others.col(j) - anchor;
    // s - <diff, omega+ - omega-> <= 0
    A.block(j, 0, 1, d) = -diff.transpose();
    A.block(j, d, 1, d) = diff.transpose();
    A(j, 2 * d) = Scalar(1);
  }
  for (Eigen::Index v = 0; v < nv; ++v) {
    A(m + v, v) = Scalar(1);
    b(m + v) = Scalar(1);
  }
  Vector<Scalar> c = Vector<Scalar>::Zero(nv);
  c(2 * d) = Scalar(1);
  const Solution<Scalar> sol = maximize<Scalar>(A, b, c);
  if (sol.status != Status::kOptimal) return {Scalar(0), {}};
  return {sol.objective, sol.x.head(d) - sol.x.segment(d, d)};
}

template <typename Scalar>
Scalar separation_slack(const Matrix<Scalar>& others,
                        const Vector<Scalar>& anchor) {
  return separation<Scalar>(others, anchor).slack;
}

/// Some solution of A x = b (free variables set to zero), or an empty
/// vector when the system is inconsistent. Exact for rationals.
template <typename Scalar>
std::optional<Vector<Scalar>> solve_particular(Matrix<Scalar> A,
                                               Vector<Scalar> b) {
  const Scalar eps = Tolerance<Scalar>::eps();
  auto absval = [](const Scalar& x) { return x < Scalar(0) ? Scalar(-x) : x; };
  const Eigen::Index rows = A.rows();
  const Eigen::Index cols = A.cols();
  std::vector<Eigen::Index> pivot_col;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index piv = -1;
    Scalar best{0};
    for (Eigen::Index i = r; i < rows; ++i) {
      const Scalar a = absval(A(i, c));
      if (a > eps && (piv < 0 || a > best)) {
        piv = i;
        best = a;
      }
    }
    if (piv < 0) continue;
    A.row(r).swap(A.row(piv));
    std::swap(b(r), b(piv));
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r) continue;
      const Scalar f = A(i, c) / A(r, c);
      if (f != Scalar(0)) {
        A.row(i) -= f * A.row(r);
        b(i) -= f * b(r);
      }
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (Eigen::Index i = r; i < rows; ++i)
    if (absval(b(i)) > eps) return std::nullopt;
  Vector<Scalar> x = Vector<Scalar>::Zero(cols);
  for (Eigen::Index i = 0; i < r; ++i)
    x(pivot_col[i]) = b(i) / A(i, pivot_col[i]);
  return x;
}

/// Row-echelon rank with the scalar's zero test.
template <typename Scalar>
Eigen::Index rank(Matrix<Scalar> M) {
  const Scalar eps = Tolerance<Scalar>::eps();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < M.cols() && r < M.rows(); ++c) {
    Eigen::Index piv = -1;
    Scalar best{0};
    for (Eigen::Index i = r; i < M.rows(); ++i) {
      Scalar a = M(i, c) < Scalar(0) ? Scalar(-M(i, c)) : M(i, c);
      if (a > eps && (piv < 0 || a > best)) {
        piv = i;
        best = a;
      }
    }
    if (piv < 0) continue;
    M.row(r).swap(M.row(piv));
    for (Eigen::Index i = r + 1; i < M.rows(); ++i) {
      const Scalar f = M(i, c) / M(r, c);
      if (f != Scalar(0)) M.row(i) -= f * M.row(r);
    }
    ++r;
  }
  return r;
}

extern template Solution<double> maximize<double>(const Matrix<double>&,
                                                  const Vector<double>&,
                                                  const Vector<double>&);
extern template Solution<Rational> maximize<Rational>(const Matrix<Rational>&,
                                                      const Vector<Rational>&,
                                                      const Vector<Rational>&);

}  // namespace fewlab::lp
