#pragma once

#include "sivo/certificates.hpp"
#include "sivo/problem.hpp"

#include <optional>
#include <vector>

namespace sivo {

/// Polyhedral cone K = cone{k_1, ..., k_r} in R^q and its positive polar
/// K+ = {y : <y, k> >= 0 for all k in K}, generated exactly by +-basis vectors of the
/// lineality space (span K)^perp and the extreme rays of the pointed part.
class PolyCone {
 public:
  static constexpr int kMaxDim = 6;

  /// Throws PreconditionError for q > kMaxDim or mixed dimensions.
  PolyCone(int q, std::vector<Vector> generators);

  int dim() const noexcept { return q_; }
  const std::vector<Vector>& generators() const noexcept { return gens_; }
  /// Unit-norm generators of K+.
  const std::vector<Vector>& dual_generators() const noexcept { return dual_; }

  /// Whether -y lies in K (nonnegative least squares on the generators).
  bool contains_negative(const Vector& y, double tol = 1e-9) const;
  /// Whether y lies in K+ (against every primal generator).
  bool in_dual(const Vector& y, double tol = 1e-12) const;

 private:
  int q_;
  std::vector<Vector> gens_;
  std::vector<Vector> dual_;
};

/// g(x) in -K with g = (g_1, ..., g_q) given componentwise.
struct ConeConstrainedProblem {
  int n = 1;
  std::vector<Expr> objectives;
  std::vector<Expr> g;  // functions of x only
  PolyCone cone;
  OmegaSet omega;
};

/// Problem with the single family g_s(x) = <s, g(x)> indexed by the dual generators s.
Problem scalarize_cone_problem(const ConeConstrainedProblem& cc);

/// zeta = sum mu_s s over the dual generators; checks zeta in K+.
/// `mu` refers to family 0 of the scalarized problem.
Vector recover_zeta(const MultiplierMu& mu, const PolyCone& cone);

/// g(x) = F_0 + sum_i F_i x_i with symmetric p x p data.
struct SdpData {
  int p = 1;
  std::vector<Matrix> F;  // F[0] = F_0, then F_1..F_n

  int n() const noexcept { return static_cast<int>(F.size()) - 1; }
  Matrix g(const Vector& x) const;
  void validate() const;
};

struct SdpOptions {
  std::optional<Matrix> Lambda;
  std::optional<Vector> lambda;
  Tolerances tol;
  /// Random rank-one directions added to the coordinate ones when the active
  /// eigenspace has dimension >= 2.
  int samples = 64;
  int polish_iterations = 500;
  unsigned seed = 11;
};

struct SdpCertificate {
  Certificate cert;  // fixed_term holds Lambda . F
  Matrix Lambda;
  double lambda_min_eig = 0.0;
  double complementarity = 0.0;  // Lambda . g(xbar)
  double g_max_eig = 0.0;
  int active_rank = 0;           // dimension of the near-null space of g(xbar)
  bool exact_search = true;      // rank-one generators represent every admissible Lambda
};

/// Approximate KKT inclusion for an affine matrix inequality g(x) <= 0 (negative semidefinite).
/// `base` supplies n, the objectives and Omega; its constraint families must be empty.
SdpCertificate sdp_check_kkt(const Problem& base, const SdpData& sd, const Vector& xbar, const Vector& xi,
                             const SdpOptions& opts = {});

/// (A . B) = trace(A B) for symmetric A, B.
double frobenius_dot(const Matrix& A, const Matrix& B);

}  // namespace sivo
