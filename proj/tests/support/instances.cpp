#include "instances.hpp"

#include <Eigen/Eigenvalues>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace sivo::testing {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string("(") + buf + ")";
}

double ConvexInstance::lipschitz_bound() const {
  double L = 0.0;
  const int n = problem.n();
  for (std::size_t i = 0; i < A.size(); ++i) {
    // ||A (x - c)|| <= ||A||_2 * max over the box of ||x - c||
    const double radius = (Vector::Ones(n) + centre[i].cwiseAbs()).norm();
    L = std::max(L, A[i].operatorNorm() * radius);
  }
  return L;
}

Vector ConvexInstance::values(const Vector& x) const {
  Vector f(static_cast<Eigen::Index>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i) {
    const Vector d = x - centre[i];
    f[static_cast<Eigen::Index>(i)] = 0.5 * d.dot(A[i] * d) + offset[i];
  }
  return f;
}

double ConvexInstance::constraint_max(const Vector& x) const {
  return std::max(g_a.dot(x) + g_b, (g_a + g_c).dot(x) + g_b + g_e);
}

bool ConvexInstance::feasible(const Vector& x, double tol) const {
  return x.cwiseAbs().maxCoeff() <= 1.0 + tol && constraint_max(x) <= tol;
}

double ConvexInstance::grid_radius() const {
  double h = 0.0;
  for (Eigen::Index i = 0; i < grid.lo.size(); ++i)
    h = std::max(h, (grid.hi[i] - grid.lo[i]) / (grid.points_per_dim[static_cast<std::size_t>(i)] - 1));
  return h * std::sqrt(static_cast<double>(grid.lo.size()));
}

namespace {

std::string var(int n, int i) { return n == 1 ? "x" : "x" + std::to_string(i + 1); }

}  // namespace

ConvexInstance random_convex_instance(std::mt19937_64& rng, int n, int m, int points) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 1.5);

  std::vector<Matrix> As;
  std::vector<Vector> cs;
  std::vector<double> es;
  std::vector<Expr> objectives;
  for (int i = 0; i < m; ++i) {
    Matrix B(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) B(r, c) = U(rng);
    Matrix A = B.transpose() * B + 0.2 * Matrix::Identity(n, n);
    Vector c(n);
    for (int r = 0; r < n; ++r) c[r] = 1.2 * U(rng);
    const double e = 0.5 * U(rng);
    std::ostringstream s;
    s << format_number(e);
    for (int r = 0; r < n; ++r)
      for (int q = 0; q < n; ++q)
        s << " + " << format_number(0.5 * A(r, q)) << "*(" << var(n, r) << " - " << format_number(c[r]) << ")*("
          << var(n, q) << " - " << format_number(c[q]) << ")";
    objectives.push_back(Expr::parse(s.str(), n, 0));
    As.push_back(A);
    cs.push_back(c);
    es.push_back(e);
  }

  // (a + t c)'x + b + e t <= 0, strictly feasible at the origin
  Vector a(n), cc(n);
  for (int r = 0; r < n; ++r) {
    a[r] = U(rng);
    cc[r] = 0.5 * U(rng);
  }
  const double et = 0.3 * U(rng);
  const double b = -0.15 - std::max(0.0, et) - 0.6 * std::abs(U(rng));
  std::ostringstream g;
  g << format_number(b) << " + " << format_number(et) << "*t";
  for (int r = 0; r < n; ++r)
    g << " + (" << format_number(a[r]) << " + " << format_number(cc[r]) << "*t)*" << var(n, r);
  std::vector<ConstraintFamily> fams;
  fams.push_back({"g", Expr::parse(g.str(), n, 1), IndexDomain::interval(0.0, 1.0)});

  Problem P(n, std::move(objectives), std::move(fams), OmegaSet::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)));

  Vector xi(m);
  std::uniform_real_distribution<double> X(0.01, 0.1);
  for (int i = 0; i < m; ++i) xi[i] = X(rng);

  if (points <= 0) points = n == 1 ? 401 : n == 2 ? 61 : 21;
  GridSpec spec{Vector::Constant(n, -1.0), Vector::Constant(n, 1.0), std::vector<int>(static_cast<std::size_t>(n), points), {}};
  return ConvexInstance{std::move(P), std::move(As), std::move(cs), std::move(es), xi, std::move(spec), a, cc, b, et};
}

std::optional<Vector> weighted_minimizer(const ConvexInstance& inst, const Vector& w) {
  const int n = inst.problem.n();
  Matrix H = Matrix::Zero(n, n);
  Vector q = Vector::Zero(n);
  for (std::size_t i = 0; i < inst.A.size(); ++i) {
    H += w[static_cast<Eigen::Index>(i)] * inst.A[i];
    q += w[static_cast<Eigen::Index>(i)] * inst.A[i] * inst.centre[i];
  }
  // rows r'x <= s
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (int i = 0; i < n; ++i) {
    rows.push_back(Vector::Unit(n, i));
    rhs.push_back(1.0);
    rows.push_back(-Vector::Unit(n, i));
    rhs.push_back(1.0);
  }
  rows.push_back(inst.g_a);
  rhs.push_back(-inst.g_b);
  rows.push_back(inst.g_a + inst.g_c);
  rhs.push_back(-inst.g_b - inst.g_e);
  const int R = static_cast<int>(rows.size());

  std::optional<Vector> best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> active;
  auto try_set = [&]() {
    const int k = static_cast<int>(active.size());
    Matrix K = Matrix::Zero(n + k, n + k);
    Vector r = Vector::Zero(n + k);
    K.topLeftCorner(n, n) = H;
    r.head(n) = q;
    for (int j = 0; j < k; ++j) {
      K.block(0, n + j, n, 1) = rows[static_cast<std::size_t>(active[static_cast<std::size_t>(j)])];
      K.block(n + j, 0, 1, n) = rows[static_cast<std::size_t>(active[static_cast<std::size_t>(j)])].transpose();
      r[n + j] = rhs[static_cast<std::size_t>(active[static_cast<std::size_t>(j)])];
    }
    Eigen::FullPivLU<Matrix> lu(K);
    if (lu.rank() < n + k) return;
    const Vector z = lu.solve(r);
    const Vector x = z.head(n);
    for (int j = 0; j < k; ++j)
      if (z[n + j] < -1e-12) return;
    for (int j = 0; j < R; ++j)
      if (rows[static_cast<std::size_t>(j)].dot(x) > rhs[static_cast<std::size_t>(j)] + 1e-12) return;
    const double v = w.dot(inst.values(x));
    if (v < best_value) {
      best_value = v;
      best = x;
    }
  };
  std::function<void(int)> rec = [&](int from) {
    try_set();
    if (static_cast<int>(active.size()) == n) return;
    for (int j = from; j < R; ++j) {
      active.push_back(j);
      rec(j + 1);
      active.pop_back();
    }
  };
  rec(0);
  return best;
}

std::vector<Vector> local_probes(const ConvexInstance& inst, const Vector& xbar, double h) {
  const int n = inst.problem.n();
  const int m = inst.problem.m();
  std::vector<Vector> dirs;
  if (n == 1) {
    dirs = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  } else if (n == 2) {
    for (int k = 0; k < 1440; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 1440;
      Vector u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
  } else {
    // Fibonacci sphere
    const int K = 6000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < K; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / K;
      const double r = std::sqrt(1.0 - z * z);
      Vector u(3);
      u << r * std::cos(golden * k), r * std::sin(golden * k), z;
      dirs.push_back(u);
    }
  }
  std::vector<Vector> grads;
  for (int i = 0; i < m; ++i) grads.push_back(inst.gradient(i, xbar));
  for (int i = 0; i < m; ++i) {
    dirs.push_back(-grads[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < m; ++j) dirs.push_back(-(grads[static_cast<std::size_t>(i)] + grads[static_cast<std::size_t>(j)]));
  }

  // projections onto faces that are active or within reach of the first radius
  std::vector<Vector> faces, active;
  for (int i = 0; i < n; ++i) {
    if (xbar[i] >= 1.0 - h) faces.push_back(Vector::Unit(n, i));
    if (xbar[i] <= -1.0 + h) faces.push_back(-Vector::Unit(n, i));
    if (xbar[i] >= 1.0 - 1e-12) active.push_back(Vector::Unit(n, i));
    if (xbar[i] <= -1.0 + 1e-12) active.push_back(-Vector::Unit(n, i));
  }
  const double g0 = inst.g_a.dot(xbar) + inst.g_b;
  const double g1 = (inst.g_a + inst.g_c).dot(xbar) + inst.g_b + inst.g_e;
  if (g0 >= -h * inst.g_a.norm()) faces.push_back(inst.g_a);
  if (g1 >= -h * (inst.g_a + inst.g_c).norm()) faces.push_back(inst.g_a + inst.g_c);
  if (g0 >= -1e-12) active.push_back(inst.g_a);
  if (g1 >= -1e-12) active.push_back(inst.g_a + inst.g_c);
  const std::size_t base = dirs.size();
  for (std::size_t k = 0; k < base; ++k)
    for (const auto& a : faces) {
      const double out = a.dot(dirs[k]);
      if (out > 0.0) dirs.push_back(dirs[k] - out / a.squaredNorm() * a);
    }

  // directions leaving an active face never reach a feasible point
  auto margin_of = [&](const Vector& u) {
    for (const auto& a : active)
      if (a.dot(u) > 1e-12) return -std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) margin = std::min(margin, -grads[static_cast<std::size_t>(i)].dot(u) - inst.xi[i]);
    return margin;
  };
  std::vector<std::pair<double, Vector>> scored;
  for (auto& u : dirs) {
    const double len = u.norm();
    if (len < 1e-14) continue;
    u /= len;
    scored.emplace_back(margin_of(u), u);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  // Improving cones can be thinner than the sphere spacing. Climb the concave margin
  // u -> min_i <-grad f_i, u> - xi_i on the unit sphere from the best sampled directions,
  // holding either the active faces or all nearby ones.
  const std::size_t starts = std::min<std::size_t>(8, scored.size());
  for (std::size_t sidx = 0; sidx < starts; ++sidx)
    for (int hold = 0; hold < 2; ++hold) {
      Vector u = scored[sidx].second;
      auto project = [&](Vector v) {
        for (int pass = 0; pass < 3; ++pass)
          for (const auto& a : hold == 0 ? active : faces) {
            const double o = a.dot(v);
            if (o > 0.0) v -= o / a.squaredNorm() * a;
          }
        return v;
      };
      u = project(u);
      if (u.norm() < 1e-14) continue;
      u.normalize();
      Vector best = u;
      double best_margin = margin_of(u);
      for (int it = 1; it <= 3000; ++it) {
        int worst = 0;
        double lo = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
          const double v = -grads[static_cast<std::size_t>(i)].dot(u);
          if (v < lo) {
            lo = v;
            worst = i;
          }
        }
        const Vector& g = grads[static_cast<std::size_t>(worst)];
        // tangential part of -g
        Vector step = -g + g.dot(u) * u;
        if (step.norm() < 1e-15) break;
        Vector v = project(u + (0.5 / std::sqrt(static_cast<double>(it))) * step / step.norm());
        if (v.norm() < 1e-14) break;
        u = v.normalized();
        const double mu = margin_of(u);
        if (mu > best_margin) {
          best_margin = mu;
          best = u;
        }
      }
      scored.emplace_back(best_margin, best);
    }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::erase_if(scored, [](const auto& p) { return p.first <= 0.0; });
  if (scored.size() > 64) scored.resize(64);

  std::vector<Vector> out;
  for (const auto& [margin, u] : scored)
    for (int k = 0; k <= 30; ++k) {
      const Vector y = xbar + h * std::ldexp(1.0, -k) * u;
      if (inst.feasible(y, 0.0)) out.push_back(y);
    }
  return out;
}

std::vector<Vector> candidate_points(const ConvexInstance& inst, const FeasibleGrid& grid, std::mt19937_64& rng) {
  std::vector<Vector> out;
  if (grid.empty()) return out;
  out.push_back(find_xi_pareto(inst.problem, inst.xi, grid).x);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  out.push_back(ekeland_quasi(inst.problem, inst.xi, grid.points()[pick(rng)], grid).x);
  std::uniform_real_distribution<double> W(0.0, 1.0);
  const int m = inst.problem.m();
  for (int k = 0; k < 3; ++k) {
    Vector w(m);
    for (int i = 0; i < m; ++i) w[i] = W(rng) + 1e-3;
    const Eigen::RowVectorXd s = w.transpose() * grid.values();
    Eigen::Index best = 0;
    s.minCoeff(&best);
    out.push_back(grid.points()[static_cast<std::size_t>(best)]);
  }
  for (int k = 0; k < 3; ++k) out.push_back(grid.points()[pick(rng)]);
  return out;
}

}  // namespace sivo::testing
