#pragma once

#include "sivo/types.hpp"

namespace sivo {

struct NnlsResult {
  Vector x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
NnlsResult nnls(const Matrix& A, const Vector& b, int max_iter = 0, double tol = -1.0);

}  // namespace sivo
