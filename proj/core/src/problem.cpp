#include "sivo/problem.hpp"

#include "sivo/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sivo {

IndexDomain IndexDomain::finite(std::vector<Vector> points) {
  if (points.empty()) throw PreconditionError("index domain needs at least one point");
  IndexDomain d;
  d.kind_ = Kind::Finite;
  d.dim_ = static_cast<int>(points.front().size());
  for (const auto& p : points)
    if (p.size() != d.dim_) throw PreconditionError("index points have mixed dimensions");
  d.grid_ = std::move(points);
  return d;
}

IndexDomain IndexDomain::interval(double a, double b, int resolution) {
  return box(Vector::Constant(1, a), Vector::Constant(1, b), {resolution});
}

IndexDomain IndexDomain::box(Vector lo, Vector hi, std::vector<int> resolution) {
  if (lo.size() != hi.size() || lo.size() == 0) throw PreconditionError("index box bounds mismatch");
  if (resolution.size() == 1 && lo.size() > 1) resolution.assign(static_cast<std::size_t>(lo.size()), resolution.front());
  if (static_cast<Eigen::Index>(resolution.size()) != lo.size())
    throw PreconditionError("index box needs one resolution per dimension");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
      throw PreconditionError("index box bounds must be finite with lo <= hi");
    if (resolution[static_cast<std::size_t>(i)] < 2 && lo[i] < hi[i])
      throw PreconditionError("index resolution must be at least 2");
  }
  IndexDomain d;
  d.kind_ = lo.size() == 1 ? Kind::Interval : Kind::Box;
  d.dim_ = static_cast<int>(lo.size());
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  d.resolution_ = std::move(resolution);
  d.build_grid();
  return d;
}

void IndexDomain::build_grid() {
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < dim_; ++i) {
    const int p = lo_[i] == hi_[i] ? 1 : resolution_[static_cast<std::size_t>(i)];
    std::vector<double> axis(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k)
      axis[static_cast<std::size_t>(k)] = p == 1 ? lo_[i] : lo_[i] + (hi_[i] - lo_[i]) * k / (p - 1);
    if (p > 1) axis.back() = hi_[i];
    axes.push_back(std::move(axis));
  }
  grid_.clear();
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim_), 0);
  for (;;) {
    Vector t(dim_);
    for (int i = 0; i < dim_; ++i) t[i] = axes[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    grid_.push_back(std::move(t));
    int i = dim_ - 1;
    for (; i >= 0; --i) {
      auto& k = idx[static_cast<std::size_t>(i)];
      if (++k < axes[static_cast<std::size_t>(i)].size()) break;
      k = 0;
    }
    if (i < 0) break;
  }
}

IndexDomain IndexDomain::refined() const {
  if (kind_ == Kind::Finite) return *this;
  std::vector<int> res = resolution_;
  for (auto& r : res) r = 2 * r - 1;
  return box(lo_, hi_, std::move(res));
}

std::optional<std::size_t> find_grid_point(const IndexDomain& domain, const Vector& t, double tol) {
  const auto& g = domain.grid();
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g[k].size() == t.size() && (g[k].size() == 0 || (g[k] - t).lpNorm<Eigen::Infinity>() <= tol)) return k;
  return std::nullopt;
}

OmegaSet OmegaSet::whole(int n) {
  if (n < 1) throw PreconditionError("dimension must be positive");
  OmegaSet o;
  o.kind_ = Kind::Whole;
  o.n_ = n;
  return o;
}

OmegaSet OmegaSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0) throw PreconditionError("Omega box bounds mismatch");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i])
      throw PreconditionError("Omega box is empty: lower bound exceeds upper bound in coordinate " + std::to_string(i + 1));
  OmegaSet o;
  o.kind_ = Kind::Box;
  o.n_ = static_cast<int>(lower.size());
  o.lo_ = std::move(lower);
  o.hi_ = std::move(upper);
  return o;
}

OmegaSet OmegaSet::polyhedron(Matrix A, Vector b) {
  if (A.rows() != b.size() || A.cols() == 0) throw PreconditionError("Omega polyhedron data mismatch");
  OmegaSet o;
  o.kind_ = Kind::Polyhedron;
  o.n_ = static_cast<int>(A.cols());
  o.A_ = std::move(A);
  o.b_ = std::move(b);
  return o;
}

double OmegaSet::violation(const Vector& x) const {
  if (x.size() != n_) throw PreconditionError("point has the wrong dimension for Omega");
  double v = -std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::Whole:
      return v;
    case Kind::Box:
      for (Eigen::Index i = 0; i < n_; ++i) v = std::max({v, lo_[i] - x[i], x[i] - hi_[i]});
      return v;
    case Kind::Polyhedron:
      return A_.rows() == 0 ? v : (A_ * x - b_).maxCoeff();
  }
  return v;
}

TangentCone OmegaSet::tangent_cone(const Vector& x, double tol) const {
  TangentCone tc = TangentCone::whole(n_);
  switch (kind_) {
    case Kind::Whole:
      break;
    case Kind::Box:
      for (Eigen::Index i = 0; i < n_; ++i) {
        if (std::isfinite(hi_[i]) && x[i] >= hi_[i] - tol * (1.0 + std::abs(hi_[i])))
          tc.rows.push_back(Vector::Unit(n_, i));
        if (std::isfinite(lo_[i]) && x[i] <= lo_[i] + tol * (1.0 + std::abs(lo_[i])))
          tc.rows.push_back(-Vector::Unit(n_, i));
      }
      break;
    case Kind::Polyhedron:
      for (Eigen::Index l = 0; l < A_.rows(); ++l)
        if (A_.row(l).dot(x) >= b_[l] - tol * (1.0 + std::abs(b_[l]))) tc.rows.push_back(A_.row(l).transpose());
      break;
  }
  return tc;
}

Problem::Problem(int n, std::vector<Expr> objectives, std::vector<ConstraintFamily> constraints, OmegaSet omega)
    : n_(n), objectives_(std::move(objectives)), constraints_(std::move(constraints)), omega_(std::move(omega)) {
  if (n_ < 1) throw PreconditionError("dimension must be positive");
  if (objectives_.empty()) throw PreconditionError("a problem needs at least one objective");
  for (const auto& f : objectives_)
    if (f.num_vars() != n_ || f.num_params() != 0)
      throw PreconditionError("objective '" + f.to_string() + "' must depend on x1..x" + std::to_string(n_) + " only");
  for (const auto& c : constraints_)
    if (c.expr.num_vars() != n_ || c.expr.num_params() != c.domain.dim())
      throw PreconditionError("constraint '" + c.label + "' does not match the dimension or its index domain");
  if (omega_.dim() != n_) throw PreconditionError("Omega has the wrong dimension");
}

Problem Problem::refined() const {
  std::vector<ConstraintFamily> cs = constraints_;
  for (auto& c : cs) c.domain = c.domain.refined();
  return Problem(n_, objectives_, std::move(cs), omega_);
}

Vector Problem::objective_values(const Vector& x) const {
  Vector v(m());
  for (int i = 0; i < m(); ++i) v[i] = objectives_[static_cast<std::size_t>(i)].eval(x);
  return v;
}

double Problem::g(const IndexRef& r, const Vector& x) const { return constraints_[r.family].expr.eval(x, t_of(r)); }

SubdiffSet Problem::g_subdiff(const IndexRef& r, const Vector& x, double activity_tol) const {
  return constraints_[r.family].expr.clarke_subdiff(x, t_of(r), activity_tol);
}

std::string Problem::label(const IndexRef& r) const {
  const auto& c = constraints_[r.family];
  if (c.domain.dim() == 0) return c.label;
  return c.label + "@t=" + format_vector(t_of(r));
}

std::vector<IndexRef> Problem::all_indices() const {
  std::vector<IndexRef> out;
  for (std::size_t f = 0; f < constraints_.size(); ++f)
    for (std::size_t k = 0; k < constraints_[f].domain.grid().size(); ++k) out.push_back({f, k});
  return out;
}

Feasibility is_feasible(const Problem& P, const Vector& x, double tol) {
  if (x.size() != P.n()) throw PreconditionError("point has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(P.n()));
  Feasibility f;
  f.omega_violation = P.omega().violation(x);
  double G = -std::numeric_limits<double>::infinity();
  for (const auto& r : P.all_indices()) {
    const double v = P.g(r, x);
    if (v > G) {
      G = v;
      f.worst = r;
    }
  }
  f.worst_violation = std::max(f.omega_violation, G);
  f.feasible = f.omega_violation <= tol && G <= tol;
  return f;
}

double gmax(const Problem& P, const Vector& x) {
  double G = -std::numeric_limits<double>::infinity();
  for (const auto& r : P.all_indices()) G = std::max(G, P.g(r, x));
  return G;
}

std::vector<IndexRef> active_indices(const Problem& P, const Vector& x, double tol) {
  const auto all = P.all_indices();
  std::vector<double> vals;
  vals.reserve(all.size());
  for (const auto& r : all) vals.push_back(P.g(r, x));
  std::vector<IndexRef> out;
  if (all.empty()) return out;
  const double G = *std::max_element(vals.begin(), vals.end());
  for (std::size_t k = 0; k < all.size(); ++k)
    if (vals[k] >= G - tol) out.push_back(all[k]);
  return out;
}

std::vector<IndexRef> binding_indices(const Problem& P, const Vector& x, double tol) {
  std::vector<IndexRef> out;
  for (const auto& r : P.all_indices())
    if (P.g(r, x) >= -tol) out.push_back(r);
  return out;
}

double MultiplierMu::complementarity_gap(const Problem& P, const Vector& x) const {
  double gap = 0.0;
  for (const auto& e : entries) gap = std::max(gap, std::abs(e.weight * P.g(e.index, x)));
  return gap;
}

bool MultiplierMu::nonnegative() const {
  return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.weight >= 0.0; });
}

}  // namespace sivo
