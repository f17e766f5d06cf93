#pragma once

#include "sivo/convex.hpp"
#include "sivo/expr.hpp"
#include "sivo/types.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sivo {

/// Index set of a constraint family together with its discretization.
class IndexDomain {
 public:
  enum class Kind { Finite, Interval, Box };

  static constexpr int kDefaultResolution = 201;

  /// Explicit list of parameter values, all of the same dimension (possibly 0).
  static IndexDomain finite(std::vector<Vector> points);
  /// A single unparameterized constraint.
  static IndexDomain single() { return finite({Vector()}); }
  static IndexDomain interval(double a, double b, int resolution = kDefaultResolution);
  static IndexDomain box(Vector lo, Vector hi, std::vector<int> resolution);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  const Vector& lo() const noexcept { return lo_; }
  const Vector& hi() const noexcept { return hi_; }
  const std::vector<int>& resolution() const noexcept { return resolution_; }
  const std::vector<Vector>& grid() const noexcept { return grid_; }

  /// Same domain with 2p - 1 points per dimension; the old grid is a subset.
  IndexDomain refined() const;

 private:
  IndexDomain() = default;
  void build_grid();

  Kind kind_ = Kind::Finite;
  int dim_ = 0;
  Vector lo_, hi_;
  std::vector<int> resolution_;
  std::vector<Vector> grid_;
};

/// The geometric constraint set.
class OmegaSet {
 public:
  enum class Kind { Whole, Box, Polyhedron };

  static OmegaSet whole(int n);
  /// l <= x <= u; infinite bounds are allowed.
  static OmegaSet box(Vector lower, Vector upper);
  /// A x <= b.
  static OmegaSet polyhedron(Matrix A, Vector b);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return n_; }
  const Vector& lower() const noexcept { return lo_; }
  const Vector& upper() const noexcept { return hi_; }
  const Matrix& A() const noexcept { return A_; }
  const Vector& b() const noexcept { return b_; }

  /// Largest constraint violation (<= 0 inside).
  double violation(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-9) const { return violation(x) <= tol; }

  /// Rows of the constraints active at x (within `tol`, relative to the bound size).
  TangentCone tangent_cone(const Vector& x, double tol = 1e-8) const;
  NormalCone normal_cone(const Vector& x, double tol = 1e-8) const { return polar(tangent_cone(x, tol)); }

 private:
  Kind kind_ = Kind::Whole;
  int n_ = 0;
  Vector lo_, hi_;
  Matrix A_;
  Vector b_;
};

/// g(x, t) <= 0 for every t in `domain`.
struct ConstraintFamily {
  std::string label;
  Expr expr;
  IndexDomain domain;
};

/// One constraint g_t: the family and the grid position of t.
struct IndexRef {
  std::size_t family = 0;
  std::size_t point = 0;

  friend bool operator==(const IndexRef&, const IndexRef&) = default;
  friend auto operator<=>(const IndexRef&, const IndexRef&) = default;
};

class Problem {
 public:
  Problem(int n, std::vector<Expr> objectives, std::vector<ConstraintFamily> constraints, OmegaSet omega);

  int n() const noexcept { return n_; }
  int m() const noexcept { return static_cast<int>(objectives_.size()); }
  const std::vector<Expr>& objectives() const noexcept { return objectives_; }
  const std::vector<ConstraintFamily>& constraints() const noexcept { return constraints_; }
  const OmegaSet& omega() const noexcept { return omega_; }

  /// Copy with every index grid refined once.
  Problem refined() const;

  Vector objective_values(const Vector& x) const;
  const Vector& t_of(const IndexRef& r) const { return constraints_[r.family].domain.grid()[r.point]; }
  double g(const IndexRef& r, const Vector& x) const;
  SubdiffSet g_subdiff(const IndexRef& r, const Vector& x, double activity_tol = 1e-8) const;
  std::string label(const IndexRef& r) const;

  /// Every grid constraint, family-major.
  std::vector<IndexRef> all_indices() const;

 private:
  int n_;
  std::vector<Expr> objectives_;
  std::vector<ConstraintFamily> constraints_;
  OmegaSet omega_;
};

struct Feasibility {
  bool feasible = false;
  /// max(Omega violation, G(x)); <= 0 means feasible.
  double worst_violation = 0.0;
  double omega_violation = 0.0;
  /// Maximizing constraint, absent when the problem has no constraints.
  std::optional<IndexRef> worst;
};

Feasibility is_feasible(const Problem& P, const Vector& x, double tol = 1e-9);

/// G(x) = max over the grid of g_t(x); -inf without constraints.
double gmax(const Problem& P, const Vector& x);

/// Grid indices with g_t(x) >= G(x) - tol (the argmax set T(x)).
std::vector<IndexRef> active_indices(const Problem& P, const Vector& x, double tol = 1e-8);

/// Grid indices with g_t(x) >= -tol: the constraints a complementary multiplier may load.
std::vector<IndexRef> binding_indices(const Problem& P, const Vector& x, double tol = 1e-8);

/// Finitely supported nonnegative constraint multiplier.
struct MultiplierMu {
  struct Entry {
    IndexRef index;
    double weight = 0.0;
  };
  std::vector<Entry> entries;

  bool empty() const noexcept { return entries.empty(); }
  /// max_t |mu_t * g_t(x)|.
  double complementarity_gap(const Problem& P, const Vector& x) const;
  bool nonnegative() const;
};

/// Grid position of a parameter value, if it lies on the grid (within `tol` in max norm).
std::optional<std::size_t> find_grid_point(const IndexDomain& domain, const Vector& t, double tol = 1e-9);

}  // namespace sivo
