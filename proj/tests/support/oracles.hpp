#pragma once

// Independent reference computations for the property tests. Nothing here calls the
// solvers under test.

#include <sivo/conic.hpp>
#include <sivo/convex.hpp>
#include <sivo/problem.hpp>

#include <random>
#include <string>
#include <vector>

namespace sivo::testing {

struct Polynomial {
  int n = 1;
  std::vector<double> coeffs;
  std::vector<std::vector<int>> powers;

  std::string to_string() const;
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

Polynomial random_polynomial(std::mt19937_64& rng, int n, int max_degree);

/// max_k <a_k, x> + b_k with integer data, evaluated at a dyadic point where several
/// pieces tie exactly.
struct MaxAffine {
  std::vector<Vector> slopes;
  std::vector<double> intercepts;
  Vector point;

  int n() const { return static_cast<int>(point.size()); }
  std::string to_string() const;
  std::vector<Vector> active_gradients(double rel_tol) const;
};

MaxAffine random_max_affine(std::mt19937_64& rng, int n);

/// Same finite point sets, ignoring order and repetition.
bool same_point_set(const std::vector<Vector>& a, const std::vector<Vector>& b);

/// Random 2-D FactoredSum with at most 3 generators per block. With `planted`, the
/// simplex generators are translated so that some combination is exactly zero.
FactoredSum random_factored_sum(std::mt19937_64& rng, bool planted);

/// max(0, max over unit directions u in the dual of the cones of
///   min_k (<p_k, u> - xi_k) + min_j <q_j, u>), by a dense angle scan with local refinement.
double dual_angle_residual(const FactoredSum& s);

/// Minimum over a uniform grid of simplex weights of the distance to the family, with
/// the cone part solved in closed form. An upper bound on the true residual.
double weight_grid_residual(const FactoredSum& s, std::size_t max_points);

/// Euclidean distance from y to cone{gens} in the plane.
double planar_cone_distance(const Vector& y, const std::vector<Vector>& gens);

/// p = 2, n = 2 matrix inequality with diagonal data and the same problem written as
/// two scalar constraints.
struct DiagonalSdp {
  Problem base;
  Problem scalar;
  SdpData sdp;
  Vector point;
  Vector xi;
};

DiagonalSdp random_diagonal_sdp(std::mt19937_64& rng);

}  // namespace sivo::testing
