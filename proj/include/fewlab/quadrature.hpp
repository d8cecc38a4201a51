#pragma once

#include "fewlab/types.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>
#include <vector>

// Globally adaptive tensor Gauss-Kronrod cubature for vector-valued
// integrands on a box. The error of a cell is the Kronrod-Gauss difference
// of the component mean, which is the quantity callers report.

namespace fewlab {

struct CubatureOptions {
  double abs_tol = 1e-4;
  double rel_tol = 1e-4;
  int max_cells = 4000;
  int initial_splits = 4;  // per dimension
};

struct CubatureResult {
  VectorXd integral;  // per component
  double error = 0.0;  // estimate for the component mean
  int cells = 0;
  long evaluations = 0;
  bool converged = false;
};

namespace quadrature_detail {

struct Rule1D {
  std::vector<double> x, wk, wg;  // wg is zero off the Gauss nodes
};

// Full symmetric node list from Boost's half tables.
template <unsigned K, unsigned G>
Rule1D make_rule() {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& xa = gauss_kronrod<double, K>::abscissa();
  const auto& wa = gauss_kronrod<double, K>::weights();
  const auto& ga = gauss<double, G>::weights();
  Rule1D r;
  // Kronrod abscissas alternate Gauss / extension, starting at 0 for odd G.
  for (std::size_t i = xa.size(); i-- > 0;) {
    const double wg = i % 2 == 0 ? ga[i / 2] : 0.0;
    r.x.push_back(-xa[i]);
    r.wk.push_back(wa[i]);
    r.wg.push_back(wg);
  }
  for (std::size_t i = 1; i < xa.size(); ++i) {
    const double wg = i % 2 == 0 ? ga[i / 2] : 0.0;
    r.x.push_back(xa[i]);
    r.wk.push_back(wa[i]);
    r.wg.push_back(wg);
  }
  return r;
}

inline const Rule1D& rule_for_dim(Eigen::Index d) {
  static const Rule1D r15 = make_rule<15, 7>();
  static const Rule1D r7 = make_rule<7, 3>();
  return d <= 2 ? r15 : r7;
}

struct Cell {
  VectorXd lo, hi;
  VectorXd value;
  double error = 0.0;
  bool operator<(const Cell& o) const { return error < o.error; }
};

template <typename F>
void integrate_cell(F& f, int components, const Rule1D& rule, Cell& cell,
                    long& evals, VectorXd& node_out) {
  const Eigen::Index d = cell.lo.size();
  const std::size_t m = rule.x.size();
  const VectorXd half = 0.5 * (cell.hi - cell.lo);
  const VectorXd mid = 0.5 * (cell.hi + cell.lo);
  double vol = 1.0;
  for (Eigen::Index j = 0; j < d; ++j) vol *= half(j);
  cell.value = VectorXd::Zero(components);
  double gauss_mean = 0.0, kron_mean = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  VectorXd x(d);
  for (;;) {
    double wk = vol, wg = vol;
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::size_t i = idx[static_cast<std::size_t>(j)];
      x(j) = mid(j) + half(j) * rule.x[i];
      wk *= rule.wk[i];
      wg *= rule.wg[i];
    }
    f(x, node_out);
    ++evals;
    cell.value += wk * node_out;
    const double mean = node_out.mean();
    kron_mean += wk * mean;
    gauss_mean += wg * mean;
    Eigen::Index j = 0;
    while (j < d && ++idx[static_cast<std::size_t>(j)] == m) idx[static_cast<std::size_t>(j++)] = 0;
    if (j == d) break;
  }
  cell.error = std::abs(kron_mean - gauss_mean);
}

}  // namespace quadrature_detail

/// f(x, out) writes `components` values into out (already sized).
template <typename F>
CubatureResult adaptive_cubature(F&& f, int components, const VectorXd& lo,
                                 const VectorXd& hi,
                                 const CubatureOptions& opts = {}) {
  using namespace quadrature_detail;
  const Eigen::Index d = lo.size();
  const Rule1D& rule = rule_for_dim(d);
  CubatureResult res;
  res.integral = VectorXd::Zero(components);
  VectorXd node(components);

  std::priority_queue<Cell> heap;
  const int s = std::max(1, opts.initial_splits);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Cell c;
    c.lo.resize(d);
    c.hi.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double w = (hi(j) - lo(j)) / s;
      c.lo(j) = lo(j) + w * idx[static_cast<std::size_t>(j)];
      c.hi(j) = c.lo(j) + w;
    }
    integrate_cell(f, components, rule, c, res.evaluations, node);
    res.integral += c.value;
    res.error += c.error;
    heap.push(std::move(c));
    Eigen::Index j = 0;
    while (j < d && ++idx[static_cast<std::size_t>(j)] == s) idx[static_cast<std::size_t>(j++)] = 0;
    if (j == d) break;
  }

  const int children = 1 << d;
  while (true) {
    const double target =
        std::max(opts.abs_tol, opts.rel_tol * std::abs(res.integral.mean()));
    if (res.error <= target) {
      res.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) + children - 1 > opts.max_cells) break;
    Cell worst = heap.top();
    heap.pop();
    res.integral -= worst.value;
    res.error -= worst.error;
    const VectorXd mid = 0.5 * (worst.lo + worst.hi);
    for (int b = 0; b < children; ++b) {
      Cell c;
      c.lo = worst.lo;
      c.hi = worst.hi;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (b >> j & 1)
          c.lo(j) = mid(j);
        else
          c.hi(j) = mid(j);
      }
      integrate_cell(f, components, rule, c, res.evaluations, node);
      res.integral += c.value;
      res.error += c.error;
      heap.push(std::move(c));
    }
  }
  // Recompute the error sum to shed accumulated cancellation.
  res.cells = static_cast<int>(heap.size());
  double err = 0.0;
  while (!heap.empty()) {
    err += heap.top().error;
    heap.pop();
  }
  res.error = err;
  return res;
}

}  // namespace fewlab
