#pragma once

#include "sivo/problem.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sivo {

/// Box sampling of R^n: `points_per_dim` uniform points per coordinate (endpoints
/// included) plus any explicit extra points.
struct GridSpec {
  Vector lo, hi;
  std::vector<int> points_per_dim;
  std::vector<Vector> extra_points;
};

/// Feasible points of a box sampling, with their objective values cached.
class FeasibleGrid {
 public:
  static FeasibleGrid build(const Problem& P, const GridSpec& spec, double tol = 1e-9);
  static FeasibleGrid from_points(const Problem& P, const std::vector<Vector>& candidates, double tol = 1e-9);

  const std::vector<Vector>& points() const noexcept { return points_; }
  /// Column k holds f(points()[k]).
  const Matrix& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::size_t candidates() const noexcept { return candidates_; }
  /// Coordinate spacing of the box part (zero for explicit point lists).
  const Vector& spacing() const noexcept { return spacing_; }

 private:
  std::vector<Vector> points_;
  Matrix values_;
  std::size_t candidates_ = 0;
  Vector spacing_;
};

/// Every point of the box sampling of `spec`, in grid order (last coordinate fastest).
std::vector<Vector> box_points(const GridSpec& spec);

enum class Notion { WeakPareto, Pareto, XiWeakPareto, XiPareto, XiQuasiWeakPareto, XiQuasiPareto };
inline constexpr std::array<Notion, 6> kAllNotions{Notion::WeakPareto,   Notion::Pareto,
                                                   Notion::XiWeakPareto, Notion::XiPareto,
                                                   Notion::XiQuasiWeakPareto, Notion::XiQuasiPareto};
std::string to_string(Notion n);

struct NotionVerdict {
  Notion notion = Notion::WeakPareto;
  bool holds = true;
  /// Most violating grid point: largest min_i (f_i(xbar) - f_i(x) - shift_i), ties by grid order.
  std::optional<std::size_t> witness_index;
  Vector witness;
  Vector shifted_difference;  // f(x) + shift - f(xbar) at the witness
  bool reverified = true;
};

struct ClassificationReport {
  Vector anchor;
  Vector xi;
  double slack = 0.0;
  std::size_t grid_size = 0;
  std::array<NotionVerdict, 6> notions;

  const NotionVerdict& get(Notion n) const { return notions[static_cast<std::size_t>(n)]; }
};

/// Brute-force test of the six solution notions at xbar over the grid. A weak-type
/// notion is violated when min_i d_i > slack, a Pareto-type one when min_i d_i >= 0
/// and max_i d_i > slack, where d = f(xbar) - f(x) - shift.
ClassificationReport classify_point(const Problem& P, const Vector& xbar, const Vector& xi, const FeasibleGrid& grid,
                                    double slack = 0.0);

struct SectionResult {
  bool bounded = true;
  bool empty = false;
  Vector bound;                 // componentwise infimum at the largest scale
  std::vector<double> scales;   // box enlargement factors
  std::vector<Vector> infima;   // per scale (empty vector when the section is empty)
  std::vector<std::size_t> section_sizes;
  std::string note;
};

/// Section {f(x) : x in C, f(x) <= ybar} on the grid of `spec` enlarged x1, x2, x4, x8
/// about its centre. Unbounded evidence: some component attains its infimum on the box
/// boundary at every scale >= 2 and its decrease does not shrink under enlargement.
SectionResult bounded_section(const Problem& P, const Vector& ybar, const GridSpec& spec, double tol = 1e-9);

struct GridPoint {
  std::size_t index = 0;
  Vector x;
  Vector f;
};

/// First grid point x* with no grid x such that f(x) + xi <= f(x*), f(x) + xi != f(x*).
GridPoint find_xi_pareto(const Problem& P, const Vector& xi, const FeasibleGrid& grid);

struct EkelandResult {
  Vector x;
  Vector f;
  std::vector<Vector> path;  // visited points, starting with x0
  std::size_t iterations = 0;
};

/// Descent on the grid: while some grid x has f(x) + ||x - x_k|| xi <= f(x_k) (not equal),
/// move to the one of least sum f. Requires xi > 0 componentwise.
EkelandResult ekeland_quasi(const Problem& P, const Vector& xi, const Vector& x0, const FeasibleGrid& grid,
                            double tol = 1e-9);

/// max_i f_i(x) - f_i(xbar) + xi_i
double scalarize_psi(const Problem& P, const Vector& xbar, const Vector& xi, const Vector& x);
/// max_i f_i(x) - f_i(xbar) + xi_i ||x - xbar||
double scalarize_phi(const Problem& P, const Vector& xbar, const Vector& xi, const Vector& x);

/// Grid positions not dominated after shifting by xi (the xi-shifted nondominated front).
std::vector<std::size_t> shifted_front(const Vector& xi, const FeasibleGrid& grid);

}  // namespace sivo
