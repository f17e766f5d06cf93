#include "sivo/lp.hpp"

#include "sivo/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sivo {

namespace {

constexpr double kPivotEps = 1e-11;

// Tableau rows 0..m-1 are constraints, row m is the objective (reduced costs,
// maximization: entering columns have positive entries). Last column is the RHS.
struct Tableau {
  Matrix t;
  std::vector<Eigen::Index> basis;
  std::vector<char> forbidden;

  Eigen::Index rows() const { return t.rows() - 1; }
  Eigen::Index cols() const { return t.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t.row(r) /= t(r, c);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = c;
  }

  // Returns Optimal, Unbounded or IterationLimit.
  LpStatus run(int& pivots, int max_pivots) {
    const Eigen::Index m = rows();
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < cols(); ++j) {
        if (!forbidden[static_cast<std::size_t>(j)] && t(m, j) > kPivotEps) {
          enter = j;  // Bland: lowest index
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (t(i, enter) > kPivotEps) {
          const double ratio = t(i, cols()) / t(i, enter);
          if (ratio < best_ratio - 1e-14 ||
              (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 &&
               basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      if (++pivots > max_pivots) return LpStatus::IterationLimit;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult lp_maximize(const Vector& c, const Matrix& A, const Vector& b, int max_pivots) {
  const Eigen::Index m = A.rows();
  const Eigen::Index nz = A.cols();
  if (c.size() != nz || b.size() != m) throw PreconditionError("lp_maximize: dimension mismatch");

  std::vector<Eigen::Index> negative_rows;
  for (Eigen::Index i = 0; i < m; ++i)
    if (b[i] < 0.0) negative_rows.push_back(i);
  const Eigen::Index na = static_cast<Eigen::Index>(negative_rows.size());
  const Eigen::Index ncols = nz + m + na;

  Tableau tab;
  tab.t = Matrix::Zero(m + 1, ncols + 1);
  tab.basis.assign(static_cast<std::size_t>(m), 0);
  tab.forbidden.assign(static_cast<std::size_t>(ncols), 0);

  Eigen::Index art = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(nz) = sign * A.row(i);
    tab.t(i, nz + i) = sign;
    tab.t(i, ncols) = sign * b[i];
    if (b[i] < 0.0) {
      tab.t(i, nz + m + art) = 1.0;
      tab.basis[static_cast<std::size_t>(i)] = nz + m + art;
      ++art;
    } else {
      tab.basis[static_cast<std::size_t>(i)] = nz + i;
    }
  }

  LpResult res;
  res.z = Vector::Zero(nz);

  if (na > 0) {
    // phase 1: maximize -sum(artificials); reduced costs = sum of artificial rows
    for (Eigen::Index i : negative_rows) tab.t.row(m) += tab.t.row(i);
    for (Eigen::Index j = nz + m; j < ncols; ++j) tab.t(m, j) = 0.0;
    const LpStatus st = tab.run(res.pivots, max_pivots);
    if (st == LpStatus::IterationLimit) {
      res.status = st;
      return res;
    }
    const double infeas = tab.t(m, ncols);
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (infeas > 1e-9 * scale) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // drive remaining artificials out of the basis
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] >= nz + m) {
        for (Eigen::Index j = 0; j < nz + m; ++j) {
          if (std::abs(tab.t(i, j)) > 1e-9) {
            tab.pivot(i, j);
            break;
          }
        }
      }
    }
    for (Eigen::Index j = nz + m; j < ncols; ++j) tab.forbidden[static_cast<std::size_t>(j)] = 1;
  }

  // phase 2 objective row: c_j - c_B B^-1 A_j expressed through the current tableau
  tab.t.row(m).setZero();
  tab.t.row(m).head(nz) = c.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis[static_cast<std::size_t>(i)];
    if (bj < nz && c[bj] != 0.0) tab.t.row(m) -= c[bj] * tab.t.row(i);
  }
  res.status = tab.run(res.pivots, max_pivots);
  if (res.status != LpStatus::Optimal) return res;

  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index bj = tab.basis[static_cast<std::size_t>(i)];
    if (bj < nz) res.z[bj] = tab.t(i, ncols);
  }
  res.objective = c.dot(res.z);
  return res;
}

}  // namespace sivo
