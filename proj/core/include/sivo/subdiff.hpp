#pragma once

#include "sivo/types.hpp"

#include <vector>

namespace sivo {

/// A compact convex set conv{v_1, ..., v_k} + r*B with B the Euclidean unit ball.
/// Used for Clarke subdifferentials and every other finitely generated set.
class SubdiffSet {
 public:
  SubdiffSet(std::vector<Vector> generators, double ball_radius = 0.0);

  static SubdiffSet singleton(Vector v) { return SubdiffSet({std::move(v)}); }

  const std::vector<Vector>& generators() const noexcept { return generators_; }
  double ball_radius() const noexcept { return ball_radius_; }
  Eigen::Index dim() const noexcept { return generators_.front().size(); }

  /// Minkowski sum. Generators are all pairwise sums, deduplicated.
  SubdiffSet operator+(const SubdiffSet& other) const;
  /// The set c*S.
  SubdiffSet scaled(double c) const;

 private:
  std::vector<Vector> generators_;
  double ball_radius_;
};

/// Removes exact duplicates, keeping the first occurrence.
std::vector<Vector> unique_vectors(std::vector<Vector> vs);

}  // namespace sivo
