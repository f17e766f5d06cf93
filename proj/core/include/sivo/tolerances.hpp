#pragma once

namespace sivo {

/// Numerical tolerances shared by all certificate checks. Every report echoes
/// the values that produced it.
struct Tolerances {
  /// Constraint and Omega-membership slack for feasibility tests.
  double feasibility = 1e-9;
  /// Relative slack for active max pieces and active constraint indices.
  double activity = 1e-8;
  /// |mu_t * g_t(x)| bound for complementarity.
  double complementarity = 1e-7;
  /// Residual at or below which an inclusion is certified.
  double certificate = 1e-8;
  /// Margin a strict-direction LP must exceed for a constraint qualification to hold.
  double strict_margin = 1e-9;
  /// Scale of the strict-inequality margin in the strict generalized-convexity test.
  double strict_convexity = 1e-9;
  /// Iteration cap for inner solvers.
  int max_iter = 20000;
};

}  // namespace sivo
