#pragma once

// Shared assembly of KKT inclusions into a FactoredSum and decoding of the
// solver weights into a Certificate. Internal to the library.

#include "sivo/certificates.hpp"

#include <optional>
#include <vector>

namespace sivo::detail {

struct KktSystem {
  int n = 0;
  Vector anchor;
  Vector xi;
  std::vector<SubdiffSet> f_sets;
  /// Objectives allowed to carry weight; empty means all.
  std::vector<char> f_enabled;
  /// Ball coefficient used for every objective instead of xi_i when set.
  std::optional<double> uniform_ball;
  std::optional<Vector> lambda;

  std::vector<IndexRef> g_refs;
  std::vector<SubdiffSet> g_sets;
  std::optional<std::vector<double>> mu;  // aligned with g_refs

  /// Extra cone generators whose combination lands in fixed_term.
  std::vector<Vector> extra_cone;
  /// Fixed vector added to the sum.
  Vector fixed;

  std::vector<Vector> normal_generators;
};

struct KktSolution {
  Certificate cert;
  std::vector<double> extra_weights;
};

/// Solves and decodes. The verdict is left Inconclusive; residual and lower bound are set.
KktSolution solve_kkt_system(const KktSystem& sys, const ResidualOptions& opts);

/// Certified / refuted / inconclusive from the residual and the dual bound.
Verdict classify_residual(const Certificate& c, double tol);

}  // namespace sivo::detail
