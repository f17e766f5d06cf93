#pragma once

#include "sivo/convex.hpp"
#include "sivo/problem.hpp"
#include "sivo/tolerances.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sivo {

enum class Verdict { Certified, Refuted, Inconclusive };
std::string to_string(Verdict v);

/// A point of a generated set, given as weights over the generators.
struct WeightedPoint {
  std::vector<Vector> generators;
  std::vector<double> weights;
  Vector value;  // sum of weights * generators

  /// |value - sum w_k g_k| and how far the weights are from a probability vector.
  double consistency_error() const;
};

/// Witness for 0 in sum lambda_i df_i + sum mu_t dg_t + (sum lambda_i xi_i) B + N + fixed.
struct Certificate {
  Vector anchor;
  Vector xi;
  Vector lambda;
  MultiplierMu mu;
  std::vector<WeightedPoint> objective_subgradients;   // z_i in df_i(anchor)
  std::vector<WeightedPoint> constraint_subgradients;  // x_t in dg_t(anchor), aligned with mu.entries
  Vector ball;                                         // ||ball|| <= ball_bound
  double ball_bound = 0.0;
  std::vector<Vector> normal_generators;               // generators of N(anchor; Omega)
  std::vector<double> normal_weights;
  Vector normal;                                       // w = sum normal_weights * normal_generators
  Vector fixed_term;                                   // extra fixed vector (e.g. Lambda . F); zero by default

  double residual = 0.0;
  double lower_bound = 0.0;  // dual bound on ||s|| - r; > tol refutes the inclusion
  bool converged = true;
  int solves = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;

  /// sum lambda_i z_i + sum mu_t x_t + ball + normal + fixed_term, from the stored witnesses.
  Vector residual_vector() const;
  double recompute_residual() const { return residual_vector().norm(); }
};

struct KktOptions {
  /// When given, only these multipliers are verified; otherwise they are searched.
  std::optional<Vector> lambda;
  std::optional<MultiplierMu> mu;
  Tolerances tol;
};

/// Tests the approximate KKT inclusion at xbar.
Certificate check_kkt(const Problem& P, const Vector& xbar, const Vector& xi, const KktOptions& opts = {});

struct FuzzyOptions {
  Tolerances tol;
  /// Points per dimension of the seeding scan of the ball.
  int scan_resolution = 0;  // 0: chosen from the dimension
  int starts = 5;
};

struct FuzzyCertificate {
  double delta = 0.0;
  Vector x_delta;
  double psi = 0.0;              // psi(x_delta)
  std::vector<int> psi_active;   // objectives attaining psi(x_delta)
  std::vector<IndexRef> argmax;  // T(x_delta)
  Certificate inclusion;         // anchored at x_delta, ball bound max(xi)/delta
  std::vector<double> slacks;    // lambda_i [f_i(x_delta) - f_i(xbar) + xi_i - psi(x_delta)]
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

/// Perturbed KKT conditions near xbar: minimizes psi over C and the open delta-ball,
/// then tests the inclusion with ball radius max(xi)/delta at the minimizer.
FuzzyCertificate fuzzy_kkt(const Problem& P, const Vector& xbar, const Vector& xi, double delta,
                           const FuzzyOptions& opts = {});

struct CqResult {
  bool holds = false;
  bool vacuous = false;  // no sets to decrease: holds trivially
  Vector direction;
  double margin = 0.0;  // -max support over all sets at `direction`
  std::vector<std::string> set_labels;
  std::vector<double> support_values;  // recomputed support of each set at `direction`
  std::string note;
};

/// Condition (U): a tangent direction along which every active constraint strictly decreases.
CqResult check_cq_U(const Problem& P, const Vector& xbar, const Tolerances& tol = {});

/// Condition (A_i): a tangent direction decreasing every active constraint and every
/// objective other than `i` (0-based). A failure is relative to the hull estimate.
CqResult check_cq_Ai(const Problem& P, const Vector& xbar, int i, const Tolerances& tol = {});

struct GenConvexityOptions {
  bool strict = false;
  /// Cap on subgradient combinations per sample point.
  std::size_t max_combinations = 4096;
  Tolerances tol;
};

struct GenConvexityResult {
  bool falsified = false;
  bool capped = false;
  std::size_t samples_checked = 0;
  std::size_t programs_solved = 0;

  // counterexample (when falsified), or the last feasible direction found otherwise
  Vector x;
  std::vector<Vector> z;              // chosen z_i* per objective
  std::vector<IndexRef> constraints;  // constraints in the program
  std::vector<Vector> x_t;            // chosen x_t* per constraint
  Vector nu;
  /// Infeasibility certificate for the program <q_j, nu> <= b_j, nu tangent, ||nu|| <= radius:
  /// y on the rows and delta on the normal generators with
  /// radius ||sum y_j q_j + sum delta_l w_l|| + sum y_j b_j = dual_value < 0, sum y_j = 1.
  std::vector<Vector> row_q;
  std::vector<double> row_b;
  std::vector<double> row_weights;
  double radius = 0.0;
  std::vector<Vector> normal_generators;
  std::vector<double> normal_weights;
  double dual_value = 0.0;
  std::string note;
};

/// Falsification test of generalized convexity at xbar over the sample points.
GenConvexityResult check_gen_convexity(const Problem& P, const Vector& xbar, const std::vector<Vector>& samples,
                                       const GenConvexityOptions& opts = {});

enum class SufficiencyMode { QuasiWeak, Quasi };

struct SufficiencyResult {
  enum class Status { Satisfied, KktFails, KktInconclusive, ConvexityFalsified };
  Status status = Status::KktInconclusive;
  Verdict verdict = Verdict::Inconclusive;
  Certificate kkt;
  std::optional<GenConvexityResult> convexity;
  std::string summary;
};

std::string to_string(SufficiencyResult::Status s);

/// KKT search plus generalized-convexity falsification (strict for `Quasi`).
SufficiencyResult sufficiency_verdict(const Problem& P, const Vector& xbar, const Vector& xi, SufficiencyMode mode,
                                      const std::vector<Vector>& samples, const Tolerances& tol = {});

}  // namespace sivo
