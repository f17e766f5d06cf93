#include "sivo/convex.hpp"

#include "sivo/errors.hpp"
#include "sivo/lp.hpp"
#include "sivo/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sivo {

double support(const SubdiffSet& set, const Vector& d) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& g : set.generators()) best = std::max(best, g.dot(d));
  return best + set.ball_radius() * d.norm();
}

bool TangentCone::contains(const Vector& d, double tol) const {
  return std::all_of(rows.begin(), rows.end(), [&](const Vector& a) { return a.dot(d) <= tol; });
}

NormalCone polar(const TangentCone& tangent) { return NormalCone{tangent.dim, tangent.rows}; }

void FactoredSum::validate() const {
  if (dim < 1) throw PreconditionError("FactoredSum dimension must be positive");
  if (simplex_blocks.empty()) throw PreconditionError("FactoredSum needs at least one simplex block");
  auto check = [&](const std::vector<Vector>& gens, const std::string& what) {
    for (const auto& g : gens)
      if (g.size() != dim) throw PreconditionError(what + " generator has wrong dimension");
  };
  for (const auto& b : simplex_blocks) {
    if (b.generators.empty()) throw PreconditionError("simplex block '" + b.label + "' is empty");
    if (!(b.ball_coeff >= 0.0)) throw PreconditionError("simplex block '" + b.label + "' has a negative ball coefficient");
    check(b.generators, "simplex block '" + b.label + "'");
  }
  for (const auto& c : cone_blocks) check(c.generators, "cone block '" + c.label + "'");
  check(fixed_cone, "fixed cone");
  check(offset, "offset");
}

std::vector<double> ResidualResult::block_mass() const {
  std::vector<double> m;
  m.reserve(simplex_weights.size());
  for (const auto& w : simplex_weights) m.push_back(std::accumulate(w.begin(), w.end(), 0.0));
  return m;
}

namespace {

struct LdpSolution {
  bool feasible = false;
  double norm = 0.0;            // ||u|| of the least-distance point
  std::vector<double> weights;  // NNLS weights over [points, rays]
  bool converged = true;
};

// min ||u|| s.t. <p_k,u> >= shift_k + h, <r_j,u> >= 0  (Lawson-Hanson reduction to NNLS).
LdpSolution solve_ldp(const Matrix& E_base, const std::vector<double>& shifts, std::size_t num_points, double h) {
  Matrix E = E_base;
  const Eigen::Index last = E.rows() - 1;
  for (std::size_t k = 0; k < num_points; ++k) E(last, static_cast<Eigen::Index>(k)) = shifts[k] + h;
  Vector f = Vector::Zero(E.rows());
  f[last] = 1.0;
  const NnlsResult nn = nnls(E, f);

  LdpSolution sol;
  sol.converged = nn.converged;
  sol.weights.assign(nn.x.data(), nn.x.data() + nn.x.size());
  const Vector r = E * nn.x - f;
  // ||r||^2 = 1 - g'y; a vanishing residual means the constraints are inconsistent.
  if (r.squaredNorm() <= 1e-24 || r[last] >= -1e-300) {
    sol.feasible = false;
    sol.norm = std::numeric_limits<double>::infinity();
    return sol;
  }
  sol.feasible = true;
  sol.norm = r.head(last).norm() / std::abs(r[last]);
  return sol;
}

struct Witness {
  std::vector<double> beta;
  std::vector<double> gamma;
  Vector s;
  double value = std::numeric_limits<double>::infinity();
};

}  // namespace

ShiftedHullResult min_shifted_norm(const std::vector<Vector>& points, const std::vector<double>& shifts,
                                   const std::vector<Vector>& rays, int dim, const ResidualOptions& opts) {
  if (points.empty()) throw PreconditionError("min_shifted_norm needs at least one point");
  if (shifts.size() != points.size()) throw PreconditionError("min_shifted_norm: one shift per point");
  const std::size_t K = points.size();
  const std::size_t J = rays.size();
  const Eigen::Index n = dim;

  // Merge duplicate points (same vector, same shift) and parallel rays; weights are
  // reported on the first representative of each group.
  std::vector<std::size_t> point_rep;  // unique index -> original index
  for (std::size_t k = 0; k < K; ++k) {
    bool dup = false;
    for (std::size_t u : point_rep)
      if (points[u] == points[k] && shifts[u] == shifts[k]) dup = true;
    if (!dup) point_rep.push_back(k);
  }
  std::vector<std::size_t> ray_rep;
  std::vector<Vector> unit_rays;
  for (std::size_t j = 0; j < J; ++j) {
    const double nr = rays[j].norm();
    if (nr == 0.0) continue;
    Vector u = rays[j] / nr;
    bool dup = false;
    for (const auto& w : unit_rays)
      if ((w - u).lpNorm<Eigen::Infinity>() <= 1e-14) dup = true;
    if (!dup) {
      unit_rays.push_back(std::move(u));
      ray_rep.push_back(j);
    }
  }
  const std::size_t Ku = point_rep.size();
  const std::size_t Ju = unit_rays.size();

  std::vector<double> ushift(Ku);
  Matrix P(n, static_cast<Eigen::Index>(Ku));
  for (std::size_t k = 0; k < Ku; ++k) {
    P.col(static_cast<Eigen::Index>(k)) = points[point_rep[k]];
    ushift[k] = shifts[point_rep[k]];
  }
  Matrix R(n, static_cast<Eigen::Index>(Ju));
  for (std::size_t j = 0; j < Ju; ++j) R.col(static_cast<Eigen::Index>(j)) = unit_rays[j];

  Matrix E_base = Matrix::Zero(n + 1, static_cast<Eigen::Index>(Ku + Ju));
  E_base.topLeftCorner(n, static_cast<Eigen::Index>(Ku)) = P;
  if (Ju > 0) E_base.block(0, static_cast<Eigen::Index>(Ku), n, static_cast<Eigen::Index>(Ju)) = R;

  ShiftedHullResult out;

  auto evaluate = [&](std::vector<double> beta, std::vector<double> gamma) {
    Witness w;
    Vector s = Vector::Zero(n);
    for (std::size_t k = 0; k < Ku; ++k) s += beta[k] * P.col(static_cast<Eigen::Index>(k));
    if (Ju > 0) {
      // re-optimize the ray weights for the fixed simplex weights
      const NnlsResult g = nnls(R, -s);
      ++out.solves;
      gamma.assign(g.x.data(), g.x.data() + g.x.size());
      s += R * g.x;
    }
    double shift = 0.0;
    for (std::size_t k = 0; k < Ku; ++k) shift += beta[k] * ushift[k];
    w.value = s.norm() - shift;
    w.beta = std::move(beta);
    w.gamma = std::move(gamma);
    w.s = std::move(s);
    return w;
  };

  auto witness_from = [&](const LdpSolution& sol) -> Witness {
    double mass = 0.0;
    for (std::size_t k = 0; k < Ku; ++k) mass += sol.weights[k];
    if (!(mass > 0.0)) return Witness{};
    std::vector<double> beta(Ku), gamma(Ju);
    for (std::size_t k = 0; k < Ku; ++k) beta[k] = sol.weights[k] / mass;
    for (std::size_t j = 0; j < Ju; ++j) gamma[j] = sol.weights[Ku + j] / mass;
    return evaluate(std::move(beta), std::move(gamma));
  };

  // Fallback witness: the single best point.
  Witness best;
  {
    std::size_t kbest = 0;
    double vbest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < Ku; ++k) {
      const double v = P.col(static_cast<Eigen::Index>(k)).norm() - ushift[k];
      if (v < vbest) {
        vbest = v;
        kbest = k;
      }
    }
    std::vector<double> beta(Ku, 0.0);
    beta[kbest] = 1.0;
    best = evaluate(std::move(beta), std::vector<double>(Ju, 0.0));
  }

  double max_norm = 0.0, max_shift = -std::numeric_limits<double>::infinity(), hi_bound = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < Ku; ++k) {
    const double pn = P.col(static_cast<Eigen::Index>(k)).norm();
    max_norm = std::max(max_norm, pn);
    max_shift = std::max(max_shift, ushift[k]);
    hi_bound = std::max(hi_bound, pn - ushift[k]);
  }
  double lo = -(max_norm + std::max(max_shift, 0.0)) - 1.0;  // N(lo) = 0 <= 1
  double hi = hi_bound + 1.0;                               // N(hi) > 1
  const double scale = 1.0 + max_norm + std::abs(max_shift);
  const double gap_tol = std::min(opts.tol * 1e-3, 1e-12) * scale;

  for (int it = 0; it < 200; ++it) {
    if (best.value - lo <= gap_tol || hi - lo <= 1e-15 * scale) break;
    const double mid = 0.5 * (lo + hi);
    const LdpSolution sol = solve_ldp(E_base, ushift, Ku, mid);
    ++out.solves;
    out.converged = out.converged && sol.converged;
    if (sol.feasible && sol.norm <= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    Witness w = witness_from(sol);
    if (w.value < best.value) best = std::move(w);
  }

  out.value = best.value;
  out.lower_bound = std::min(lo, best.value);
  if (best.value - lo > std::max(opts.tol, gap_tol)) out.converged = false;

  out.point_weights.assign(K, 0.0);
  for (std::size_t k = 0; k < Ku; ++k) out.point_weights[point_rep[k]] = best.beta[k];
  out.ray_weights.assign(J, 0.0);
  for (std::size_t j = 0; j < Ju; ++j) out.ray_weights[ray_rep[j]] = best.gamma[j] / rays[ray_rep[j]].norm();

  // recompute from the reported weights so callers see exactly what they can re-verify
  out.combination = Vector::Zero(n);
  for (std::size_t k = 0; k < K; ++k) out.combination += out.point_weights[k] * points[k];
  for (std::size_t j = 0; j < J; ++j) out.combination += out.ray_weights[j] * rays[j];
  double shift = 0.0;
  for (std::size_t k = 0; k < K; ++k) shift += out.point_weights[k] * shifts[k];
  out.value = out.combination.norm() - shift;
  return out;
}

ResidualResult residual_min(const FactoredSum& sum, const ResidualOptions& opts) {
  sum.validate();
  const std::vector<Vector> offset = sum.offset.empty() ? std::vector<Vector>{Vector::Zero(sum.dim)} : sum.offset;

  struct Slot {
    std::size_t block, gen, off;
  };
  std::vector<Vector> points;
  std::vector<double> shifts;
  std::vector<Slot> slots;
  for (std::size_t b = 0; b < sum.simplex_blocks.size(); ++b) {
    const auto& blk = sum.simplex_blocks[b];
    for (std::size_t g = 0; g < blk.generators.size(); ++g)
      for (std::size_t q = 0; q < offset.size(); ++q) {
        points.push_back(blk.generators[g] + offset[q]);
        shifts.push_back(blk.ball_coeff);
        slots.push_back({b, g, q});
      }
  }
  std::vector<Vector> rays;
  for (const auto& c : sum.cone_blocks) rays.insert(rays.end(), c.generators.begin(), c.generators.end());
  rays.insert(rays.end(), sum.fixed_cone.begin(), sum.fixed_cone.end());

  const ShiftedHullResult eng = min_shifted_norm(points, shifts, rays, sum.dim, opts);

  ResidualResult res;
  res.converged = eng.converged;
  res.solves = eng.solves;
  res.objective = eng.value;
  res.lower_bound = eng.lower_bound;

  res.simplex_weights.resize(sum.simplex_blocks.size());
  for (std::size_t b = 0; b < sum.simplex_blocks.size(); ++b)
    res.simplex_weights[b].assign(sum.simplex_blocks[b].generators.size(), 0.0);
  res.offset_weights.assign(sum.offset.size(), 0.0);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Slot& s = slots[i];
    res.simplex_weights[s.block][s.gen] += eng.point_weights[i];
    if (!sum.offset.empty()) res.offset_weights[s.off] += eng.point_weights[i];
  }
  std::size_t j = 0;
  for (const auto& c : sum.cone_blocks) {
    res.cone_weights.emplace_back(eng.ray_weights.begin() + static_cast<std::ptrdiff_t>(j),
                                  eng.ray_weights.begin() + static_cast<std::ptrdiff_t>(j + c.generators.size()));
    j += c.generators.size();
  }
  res.fixed_cone_weights.assign(eng.ray_weights.begin() + static_cast<std::ptrdiff_t>(j), eng.ray_weights.end());

  // witness assembled from the reported weights
  res.combination = Vector::Zero(sum.dim);
  res.ball_radius = 0.0;
  for (std::size_t b = 0; b < sum.simplex_blocks.size(); ++b) {
    double mass = 0.0;
    for (std::size_t g = 0; g < sum.simplex_blocks[b].generators.size(); ++g) {
      res.combination += res.simplex_weights[b][g] * sum.simplex_blocks[b].generators[g];
      mass += res.simplex_weights[b][g];
    }
    res.ball_radius += sum.simplex_blocks[b].ball_coeff * mass;
  }
  for (std::size_t c = 0; c < sum.cone_blocks.size(); ++c)
    for (std::size_t g = 0; g < sum.cone_blocks[c].generators.size(); ++g)
      res.combination += res.cone_weights[c][g] * sum.cone_blocks[c].generators[g];
  for (std::size_t g = 0; g < sum.fixed_cone.size(); ++g) res.combination += res.fixed_cone_weights[g] * sum.fixed_cone[g];
  for (std::size_t q = 0; q < sum.offset.size(); ++q) res.combination += res.offset_weights[q] * sum.offset[q];

  const double sn = res.combination.norm();
  res.ball = sn > 0.0 ? Vector(-res.combination * std::min(1.0, res.ball_radius / sn)) : Vector::Zero(sum.dim);
  res.point = res.combination + res.ball;
  res.residual = res.point.norm();
  return res;
}

StrictDirection strict_direction_lp(const std::vector<std::vector<Vector>>& sets, const TangentCone& cone,
                                    double sigma_min) {
  std::vector<Vector> gens;
  for (const auto& s : sets) {
    if (s.empty()) throw PreconditionError("strict_direction_lp: empty generator list");
    gens.insert(gens.end(), s.begin(), s.end());
  }
  if (gens.empty()) throw PreconditionError("strict_direction_lp: no generators");
  const Eigen::Index n = gens.front().size();
  for (const auto& g : gens)
    if (g.size() != n) throw PreconditionError("strict_direction_lp: mixed dimensions");

  // variables: d+ (n), d- (n), sigma
  const Eigen::Index nv = 2 * n + 1;
  const Eigen::Index ng = static_cast<Eigen::Index>(gens.size());
  const Eigen::Index nr = static_cast<Eigen::Index>(cone.rows.size());
  Matrix A = Matrix::Zero(ng + nr + 2 * n + 1, nv);
  Vector b = Vector::Zero(A.rows());
  Eigen::Index row = 0;
  for (const auto& u : gens) {
    A.row(row).head(n) = u.transpose();
    A.row(row).segment(n, n) = -u.transpose();
    A(row, 2 * n) = 1.0;
    ++row;
  }
  for (const auto& a : cone.rows) {
    A.row(row).head(n) = a.transpose();
    A.row(row).segment(n, n) = -a.transpose();
    ++row;
  }
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    A(row, i) = 1.0;
    b[row] = 1.0;
    ++row;
  }
  const Eigen::Index sigma_row = row;  // inactive (0 * sigma <= 0) in the first solve

  Vector c = Vector::Zero(nv);
  c[2 * n] = 1.0;
  const LpResult first = lp_maximize(c, A, b);

  StrictDirection out;
  out.direction = Vector::Zero(n);
  if (first.status != LpStatus::Optimal) {
    out.diagnostics = "LP did not reach optimality (status " + std::to_string(static_cast<int>(first.status)) + ")";
    return out;
  }
  const double sigma = first.z[2 * n];
  Vector d = first.z.head(n) - first.z.segment(n, n);

  if (sigma > sigma_min) {
    // least-l1 direction among (numerically) optimal ones
    A(sigma_row, 2 * n) = -1.0;
    b[sigma_row] = -sigma * (1.0 - 1e-12);
    Vector c2 = Vector::Zero(nv);
    c2.head(2 * n).setConstant(-1.0);
    const LpResult second = lp_maximize(c2, A, b);
    if (second.status == LpStatus::Optimal) d = second.z.head(n) - second.z.segment(n, n);
    // the relaxed sigma shrinks d slightly; push the ray back onto the box
    const double top = d.lpNorm<Eigen::Infinity>();
    if (top > 0.0) d /= top;
  }

  double margin = std::numeric_limits<double>::infinity();
  for (const auto& u : gens) margin = std::min(margin, -u.dot(d));
  out.direction = d;
  out.margin = margin;
  out.feasible = margin > sigma_min && cone.contains(d, 1e-12);
  out.diagnostics = "optimal sigma " + std::to_string(sigma);
  if (!out.feasible) out.diagnostics += "; no strictly decreasing tangent direction";
  return out;
}

}  // namespace sivo
