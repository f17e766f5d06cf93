#include "sivo/oracle.hpp"

#include "sivo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sivo {

namespace {

// b - a in R^m_+ \ {0}
bool leq_not_equal(const Vector& a, const Vector& b) {
  bool differs = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] != b[i]) differs = true;
  }
  return differs;
}

void check_xi(const Problem& P, const Vector& xi) {
  if (xi.size() != P.m()) throw PreconditionError("xi has the wrong number of entries");
  if (xi.size() > 0 && !(xi.minCoeff() >= 0.0)) throw PreconditionError("xi must be componentwise nonnegative");
}

}  // namespace

std::vector<Vector> box_points(const GridSpec& spec) {
  const Eigen::Index n = spec.lo.size();
  if (spec.hi.size() != n || static_cast<Eigen::Index>(spec.points_per_dim.size()) != n || n == 0)
    throw PreconditionError("grid box needs lo, hi and points_per_dim of equal length");
  std::vector<std::vector<double>> axes;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int p = spec.points_per_dim[static_cast<std::size_t>(i)];
    if (p < 1 || !std::isfinite(spec.lo[i]) || !std::isfinite(spec.hi[i]) || spec.lo[i] > spec.hi[i])
      throw PreconditionError("grid box is malformed in coordinate " + std::to_string(i + 1));
    std::vector<double> axis(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k)
      axis[static_cast<std::size_t>(k)] = p == 1 ? spec.lo[i] : spec.lo[i] + (spec.hi[i] - spec.lo[i]) * k / (p - 1);
    if (p > 1) axis.back() = spec.hi[i];
    axes.push_back(std::move(axis));
  }
  std::vector<Vector> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = axes[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    out.push_back(std::move(x));
    Eigen::Index i = n - 1;
    for (; i >= 0; --i) {
      auto& k = idx[static_cast<std::size_t>(i)];
      if (++k < axes[static_cast<std::size_t>(i)].size()) break;
      k = 0;
    }
    if (i < 0) break;
  }
  return out;
}

FeasibleGrid FeasibleGrid::from_points(const Problem& P, const std::vector<Vector>& candidates, double tol) {
  FeasibleGrid g;
  g.candidates_ = candidates.size();
  std::vector<Vector> vals;
  for (const auto& x : candidates) {
    try {
      if (!is_feasible(P, x, tol).feasible) continue;
      vals.push_back(P.objective_values(x));
    } catch (const DomainError&) {
      continue;
    }
    g.points_.push_back(x);
  }
  g.values_.resize(P.m(), static_cast<Eigen::Index>(vals.size()));
  for (std::size_t k = 0; k < vals.size(); ++k) g.values_.col(static_cast<Eigen::Index>(k)) = vals[k];
  g.spacing_ = Vector::Zero(P.n());
  return g;
}

FeasibleGrid FeasibleGrid::build(const Problem& P, const GridSpec& spec, double tol) {
  if (spec.lo.size() != P.n()) throw PreconditionError("grid box has the wrong dimension");
  std::vector<Vector> cand = box_points(spec);
  for (const auto& x : spec.extra_points) {
    if (x.size() != P.n()) throw PreconditionError("extra grid point has the wrong dimension");
    cand.push_back(x);
  }
  FeasibleGrid g = from_points(P, cand, tol);
  for (Eigen::Index i = 0; i < P.n(); ++i) {
    const int p = spec.points_per_dim[static_cast<std::size_t>(i)];
    g.spacing_[i] = p > 1 ? (spec.hi[i] - spec.lo[i]) / (p - 1) : 0.0;
  }
  return g;
}

std::string to_string(Notion n) {
  switch (n) {
    case Notion::WeakPareto:
      return "weak-pareto";
    case Notion::Pareto:
      return "pareto";
    case Notion::XiWeakPareto:
      return "xi-weak-pareto";
    case Notion::XiPareto:
      return "xi-pareto";
    case Notion::XiQuasiWeakPareto:
      return "xi-quasi-weak-pareto";
    case Notion::XiQuasiPareto:
      return "xi-quasi-pareto";
  }
  return "";
}

namespace {

Vector shift_of(Notion n, const Vector& xi, double dist) {
  switch (n) {
    case Notion::WeakPareto:
    case Notion::Pareto:
      return Vector::Zero(xi.size());
    case Notion::XiWeakPareto:
    case Notion::XiPareto:
      return xi;
    case Notion::XiQuasiWeakPareto:
    case Notion::XiQuasiPareto:
      return dist * xi;
  }
  return xi;
}

bool weak_type(Notion n) {
  return n == Notion::WeakPareto || n == Notion::XiWeakPareto || n == Notion::XiQuasiWeakPareto;
}

bool violates(Notion n, const Vector& d, double slack) {
  if (weak_type(n)) return d.minCoeff() > slack;
  return d.minCoeff() >= 0.0 && d.maxCoeff() > slack;
}

}  // namespace

ClassificationReport classify_point(const Problem& P, const Vector& xbar, const Vector& xi, const FeasibleGrid& grid,
                                    double slack) {
  check_xi(P, xi);
  if (grid.empty()) throw PreconditionError("classification needs a nonempty grid");
  if (!is_feasible(P, xbar).feasible) throw PreconditionError("point " + format_vector(xbar) + " is infeasible");
  const Vector fbar = P.objective_values(xbar);

  ClassificationReport rep;
  rep.anchor = xbar;
  rep.xi = xi;
  rep.slack = slack;
  rep.grid_size = grid.size();
  std::array<double, 6> best_score;
  best_score.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < kAllNotions.size(); ++k) rep.notions[k].notion = kAllNotions[k];

  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Vector f = grid.values().col(static_cast<Eigen::Index>(j));
    const double dist = (grid.points()[j] - xbar).norm();
    for (std::size_t k = 0; k < kAllNotions.size(); ++k) {
      const Vector d = fbar - f - shift_of(kAllNotions[k], xi, dist);
      if (!violates(kAllNotions[k], d, slack)) continue;
      const double score = d.minCoeff();
      if (score > best_score[k]) {
        best_score[k] = score;
        rep.notions[k].holds = false;
        rep.notions[k].witness_index = j;
      }
    }
  }

  // re-verify each witness from scratch
  for (auto& v : rep.notions) {
    if (v.holds) continue;
    v.witness = grid.points()[*v.witness_index];
    const Vector f = P.objective_values(v.witness);
    const Vector shifted = f + shift_of(v.notion, xi, (v.witness - xbar).norm());
    v.shifted_difference = shifted - fbar;
    v.reverified = is_feasible(P, v.witness).feasible && violates(v.notion, fbar - shifted, slack);
  }
  return rep;
}

SectionResult bounded_section(const Problem& P, const Vector& ybar, const GridSpec& spec, double tol) {
  if (ybar.size() != P.m()) throw PreconditionError("ybar has the wrong number of entries");
  SectionResult res;
  const Vector centre = 0.5 * (spec.lo + spec.hi);
  const Vector half = 0.5 * (spec.hi - spec.lo);
  std::vector<std::vector<char>> on_boundary;  // per scale, per objective: infimum attained on the box boundary

  for (double s : {1.0, 2.0, 4.0, 8.0}) {
    GridSpec g{centre - s * half, centre + s * half, spec.points_per_dim, {}};
    const std::vector<Vector> pts = box_points(g);
    Vector inf = Vector::Constant(P.m(), std::numeric_limits<double>::infinity());
    std::vector<char> boundary(static_cast<std::size_t>(P.m()), 0);
    std::size_t count = 0;
    for (const auto& x : pts) {
      Vector f;
      try {
        if (!is_feasible(P, x, tol).feasible) continue;
        f = P.objective_values(x);
      } catch (const DomainError&) {
        continue;
      }
      if ((f.array() > ybar.array()).any()) continue;
      ++count;
      bool edge = false;
      for (Eigen::Index i = 0; i < x.size(); ++i) edge = edge || x[i] == g.lo[i] || x[i] == g.hi[i];
      for (Eigen::Index i = 0; i < f.size(); ++i)
        if (f[i] < inf[i]) {
          inf[i] = f[i];
          boundary[static_cast<std::size_t>(i)] = edge;
        }
    }
    res.scales.push_back(s);
    res.section_sizes.push_back(count);
    res.infima.push_back(count > 0 ? inf : Vector());
    on_boundary.push_back(boundary);
  }

  const std::size_t last = res.scales.size() - 1;
  if (std::all_of(res.section_sizes.begin(), res.section_sizes.end(), [](std::size_t c) { return c == 0; })) {
    res.empty = true;
    res.note = "section is empty on every grid";
    return res;
  }
  for (std::size_t k = res.infima.size(); k-- > 0;)
    if (res.infima[k].size() > 0) {
      res.bound = res.infima[k];
      break;
    }
  if (res.section_sizes[1] == 0 || res.section_sizes[2] == 0 || res.section_sizes[last] == 0) {
    res.note = "section empty at some scale; bound taken from the largest nonempty grid";
    return res;
  }
  for (Eigen::Index i = 0; i < P.m(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const bool edge = on_boundary[1][ui] && on_boundary[2][ui] && on_boundary[last][ui];
    const double d1 = res.infima[1][i] - res.infima[2][i];
    const double d2 = res.infima[2][i] - res.infima[last][i];
    if (edge && d1 > 1e-9 * (1.0 + std::abs(res.infima[2][i])) && d2 >= 0.75 * d1) {
      res.bounded = false;
      res.note = "objective " + std::to_string(i + 1) + " keeps decreasing at the box boundary: " +
                 std::to_string(res.infima[1][i]) + ", " + std::to_string(res.infima[2][i]) + ", " +
                 std::to_string(res.infima[last][i]);
      return res;
    }
  }
  res.note = "infimum stable under enlargement";
  return res;
}

GridPoint find_xi_pareto(const Problem& P, const Vector& xi, const FeasibleGrid& grid) {
  check_xi(P, xi);
  if (xi.size() > 0 && xi.maxCoeff() == 0.0) throw PreconditionError("xi must be nonzero");
  if (grid.empty()) throw PreconditionError("existence search needs a nonempty grid");
  const Matrix& F = grid.values();
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vector fc = F.col(static_cast<Eigen::Index>(c));
    bool dominated = false;
    for (std::size_t j = 0; j < grid.size() && !dominated; ++j)
      dominated = leq_not_equal(F.col(static_cast<Eigen::Index>(j)) + xi, fc);
    if (!dominated) return GridPoint{c, grid.points()[c], fc};
  }
  // unreachable on a finite grid: the minimizer of sum f is never dominated
  throw Error("no xi-Pareto grid point found");
}

EkelandResult ekeland_quasi(const Problem& P, const Vector& xi, const Vector& x0, const FeasibleGrid& grid, double tol) {
  check_xi(P, xi);
  if (!(xi.minCoeff() > 0.0)) throw PreconditionError("xi must be componentwise positive");
  if (!is_feasible(P, x0, tol).feasible) throw PreconditionError("start point is infeasible");
  if (grid.empty()) throw PreconditionError("existence search needs a nonempty grid");

  EkelandResult r;
  r.x = x0;
  r.f = P.objective_values(x0);
  r.path.push_back(x0);
  const Matrix& F = grid.values();
  for (;;) {
    std::optional<std::size_t> next;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Vector fj = F.col(static_cast<Eigen::Index>(j));
      if (!leq_not_equal(fj + (grid.points()[j] - r.x).norm() * xi, r.f)) continue;
      if (fj.sum() < best) {
        best = fj.sum();
        next = j;
      }
    }
    if (!next) return r;
    if (++r.iterations > grid.size()) throw Error("descent did not terminate within the grid size");
    r.x = grid.points()[*next];
    r.f = F.col(static_cast<Eigen::Index>(*next));
    r.path.push_back(r.x);
  }
}

double scalarize_psi(const Problem& P, const Vector& xbar, const Vector& xi, const Vector& x) {
  check_xi(P, xi);
  return (P.objective_values(x) - P.objective_values(xbar) + xi).maxCoeff();
}

double scalarize_phi(const Problem& P, const Vector& xbar, const Vector& xi, const Vector& x) {
  check_xi(P, xi);
  return (P.objective_values(x) - P.objective_values(xbar) + (x - xbar).norm() * xi).maxCoeff();
}

std::vector<std::size_t> shifted_front(const Vector& xi, const FeasibleGrid& grid) {
  const Matrix& F = grid.values();
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vector fc = F.col(static_cast<Eigen::Index>(c));
    bool dominated = false;
    for (std::size_t j = 0; j < grid.size() && !dominated; ++j)
      dominated = leq_not_equal(F.col(static_cast<Eigen::Index>(j)) + xi, fc);
    if (!dominated) out.push_back(c);
  }
  return out;
}

}  // namespace sivo
