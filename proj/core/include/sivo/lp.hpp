#pragma once

#include "sivo/types.hpp"

namespace sivo {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector z;
  double objective = 0.0;
  int pivots = 0;
};

/// Dense two-phase simplex (Bland's rule) for: maximize c'z s.t. A z <= b, z >= 0.
LpResult lp_maximize(const Vector& c, const Matrix& A, const Vector& b, int max_pivots = 50000);

}  // namespace sivo
