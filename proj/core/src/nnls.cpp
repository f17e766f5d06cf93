#include "sivo/nnls.hpp"

#include "sivo/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sivo {

namespace {

Vector solve_on(const Matrix& A, const Vector& b, const std::vector<Eigen::Index>& passive) {
  Matrix sub(A.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t j = 0; j < passive.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = A.col(passive[j]);
  return sub.completeOrthogonalDecomposition().solve(b);
}

}  // namespace

NnlsResult nnls(const Matrix& A, const Vector& b, int max_iter, double tol) {
  if (A.rows() != b.size()) throw PreconditionError("nnls: dimension mismatch");
  const Eigen::Index k = A.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * k + 30);
  if (tol < 0.0) {
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());
    tol = 1e3 * std::numeric_limits<double>::epsilon() * scale * static_cast<double>(std::max<Eigen::Index>(k, A.rows()));
  }

  NnlsResult res;
  res.x = Vector::Zero(k);
  if (k == 0) {
    res.residual_norm = b.norm();
    return res;
  }
  std::vector<char> in_passive(static_cast<std::size_t>(k), 0);
  std::vector<char> blocked(static_cast<std::size_t>(k), 0);
  Vector w = A.transpose() * (b - A * res.x);

  while (res.iterations < max_iter) {
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!in_passive[j] && !blocked[j] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    }
    if (enter < 0) break;
    ++res.iterations;
    in_passive[enter] = 1;

    for (int inner = 0;; ++inner) {
      std::vector<Eigen::Index> passive;
      for (Eigen::Index j = 0; j < k; ++j)
        if (in_passive[j]) passive.push_back(j);
      const Vector z = solve_on(A, b, passive);

      bool all_positive = true;
      for (std::size_t j = 0; j < passive.size(); ++j)
        if (z[static_cast<Eigen::Index>(j)] <= 0.0) all_positive = false;
      if (all_positive) {
        res.x.setZero();
        for (std::size_t j = 0; j < passive.size(); ++j) res.x[passive[j]] = z[static_cast<Eigen::Index>(j)];
        break;
      }
      const auto enter_pos = static_cast<Eigen::Index>(std::find(passive.begin(), passive.end(), enter) - passive.begin());
      if (inner == 0 && z[enter_pos] <= 0.0) {
        // the entering column cannot move off zero (rounding); exclude it for this sweep
        in_passive[enter] = 0;
        blocked[enter] = 1;
        break;
      }
      double alpha = 1.0;
      for (std::size_t j = 0; j < passive.size(); ++j) {
        const double zj = z[static_cast<Eigen::Index>(j)];
        if (zj <= 0.0) {
          const double xj = res.x[passive[j]];
          alpha = std::min(alpha, xj / (xj - zj));
        }
      }
      for (std::size_t j = 0; j < passive.size(); ++j) {
        const Eigen::Index c = passive[j];
        res.x[c] += alpha * (z[static_cast<Eigen::Index>(j)] - res.x[c]);
        if (res.x[c] <= tol * 1e-3) {
          res.x[c] = 0.0;
          in_passive[c] = 0;
        }
      }
      if (inner > 3 * k) {
        res.converged = false;
        break;
      }
    }
    w = A.transpose() * (b - A * res.x);
    // a successful step changes w, so blocked columns may become eligible again
    if (!blocked[enter])
      for (auto& bl : blocked) bl = 0;
  }
  if (res.iterations >= max_iter) res.converged = false;
  res.residual_norm = (A * res.x - b).norm();
  return res;
}

}  // namespace sivo
