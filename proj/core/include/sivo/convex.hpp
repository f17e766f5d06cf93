#pragma once

#include "sivo/subdiff.hpp"
#include "sivo/types.hpp"

#include <string>
#include <vector>

namespace sivo {

/// Support function max_{v in S} <v, d> = max_k <v_k, d> + r ||d||.
double support(const SubdiffSet& set, const Vector& d);

/// Polyhedral tangent cone {d : <a_l, d> <= 0 for all rows a_l}.
struct TangentCone {
  int dim = 0;
  std::vector<Vector> rows;

  static TangentCone whole(int dim) { return TangentCone{dim, {}}; }
  bool contains(const Vector& d, double tol = 1e-12) const;
};

/// Normal cone cone{w_1, ..., w_k}; the polar of a TangentCone.
struct NormalCone {
  int dim = 0;
  std::vector<Vector> generators;
};

NormalCone polar(const TangentCone& tangent);

/// A simplex block: weights over its generators share the joint unit mass with
/// all other simplex blocks; `ball_coeff` (xi_i) adds xi_i * mass to the ball radius.
struct SimplexBlock {
  std::string label;
  std::vector<Vector> generators;
  double ball_coeff = 0.0;
};

/// Generators with free nonnegative weights.
struct ConeBlock {
  std::string label;
  std::vector<Vector> generators;
};

/// The family { sum beta_bk v_bk + sum gamma_jk c_jk + w + q + b } with beta on the
/// joint simplex, gamma >= 0, w in cone(fixed_cone), q in conv(offset) (the origin
/// when `offset` is empty) and ||b|| <= sum_b ball_coeff_b * mass_b(beta).
struct FactoredSum {
  int dim = 0;
  std::vector<SimplexBlock> simplex_blocks;
  std::vector<ConeBlock> cone_blocks;
  std::vector<Vector> fixed_cone;
  std::vector<Vector> offset;

  void validate() const;
};

struct ResidualOptions {
  double tol = 1e-8;
  int max_iter = 20000;
};

/// Minimum-norm point of a FactoredSum together with every weight that produced it.
struct ResidualResult {
  double residual = 0.0;
  /// min over the family of ||s|| - r(beta) (negative when the ball swallows the origin with room to spare).
  double objective = 0.0;
  /// Dual lower bound on `objective`.
  double lower_bound = 0.0;
  bool converged = true;
  int solves = 0;

  std::vector<std::vector<double>> simplex_weights;
  std::vector<std::vector<double>> cone_weights;
  std::vector<double> fixed_cone_weights;
  std::vector<double> offset_weights;

  /// Block masses of the simplex weights; the recovered lambda.
  std::vector<double> block_mass() const;

  Vector combination;  // s: the weighted sum without the ball term
  Vector ball;         // b with ||b|| <= ball_radius
  double ball_radius = 0.0;
  Vector point;        // s + b
};

/// Distance from the origin to the family described by `sum`.
ResidualResult residual_min(const FactoredSum& sum, const ResidualOptions& opts = {});

/// Core engine: min over beta in the unit simplex and gamma >= 0 of
///   ||sum_k beta_k p_k + sum_j gamma_j r_j|| - sum_k beta_k shift_k.
/// Shifts may have any sign. Solved through the dual
///   max_{||u|| <= 1, <r_j,u> >= 0} min_k <p_k, u> - shift_k
/// by bisection on the level, each level a least-distance program (NNLS).
struct ShiftedHullResult {
  double value = 0.0;        // primal objective at the returned weights
  double lower_bound = 0.0;  // certified dual bound, value - lower_bound is the gap
  std::vector<double> point_weights;
  std::vector<double> ray_weights;
  Vector combination;
  bool converged = true;
  int solves = 0;
};

ShiftedHullResult min_shifted_norm(const std::vector<Vector>& points, const std::vector<double>& shifts,
                                   const std::vector<Vector>& rays, int dim,
                                   const ResidualOptions& opts = {});

struct StrictDirection {
  bool feasible = false;
  Vector direction;
  /// min over generators u of -<u, d>; recomputed from `direction`.
  double margin = 0.0;
  std::string diagnostics;
};

/// Maximizes sigma subject to <u, d> <= -sigma for every generator u of every set,
/// d in the tangent cone, ||d||_inf <= 1. Among optimal directions the one of least
/// l1 norm is returned. Feasible iff the optimal sigma exceeds `sigma_min`.
StrictDirection strict_direction_lp(const std::vector<std::vector<Vector>>& sets, const TangentCone& cone,
                                    double sigma_min = 1e-9);

}  // namespace sivo
