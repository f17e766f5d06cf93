#include "kkt_system.hpp"

#include "sivo/errors.hpp"

#include <numeric>

namespace sivo::detail {

namespace {

constexpr std::size_t kMaxTuples = 100000;

struct Factor {
  std::size_t owner;  // objective or constraint position
  double scale;
  const std::vector<Vector>* gens;
};

// Minkowski sum of scaled generator lists, remembering which generator of each
// factor produced every point.
struct Tuples {
  std::vector<Vector> points;
  std::vector<std::vector<std::size_t>> choice;
};

Tuples minkowski(const std::vector<Factor>& factors, int n, const Vector& base) {
  std::size_t count = 1;
  for (const auto& f : factors) {
    count *= f.gens->size();
    if (count > kMaxTuples) throw PreconditionError("fixed-multiplier sum has too many generator combinations");
  }
  Tuples t;
  std::vector<std::size_t> idx(factors.size(), 0);
  for (std::size_t c = 0; c < count; ++c) {
    Vector p = base.size() == n ? base : Vector::Zero(n);
    for (std::size_t f = 0; f < factors.size(); ++f) p += factors[f].scale * (*factors[f].gens)[idx[f]];
    t.points.push_back(std::move(p));
    t.choice.push_back(idx);
    for (std::size_t f = factors.size(); f-- > 0;) {
      if (++idx[f] < factors[f].gens->size()) break;
      idx[f] = 0;
    }
  }
  return t;
}

WeightedPoint make_point(const std::vector<Vector>& gens, std::vector<double> w) {
  const double mass = std::accumulate(w.begin(), w.end(), 0.0);
  if (mass > 0.0) {
    for (auto& x : w) x /= mass;
  } else {
    w.assign(gens.size(), 0.0);
    w[0] = 1.0;
  }
  WeightedPoint p{gens, std::move(w), Vector::Zero(gens.front().size())};
  for (std::size_t k = 0; k < gens.size(); ++k) p.value += p.weights[k] * gens[k];
  return p;
}

// Per-factor generator weights from the weights on tuples.
std::vector<std::vector<double>> marginals(const std::vector<Factor>& factors, const Tuples& t,
                                           const std::vector<double>& w) {
  std::vector<std::vector<double>> m;
  for (const auto& f : factors) m.emplace_back(f.gens->size(), 0.0);
  for (std::size_t c = 0; c < t.points.size(); ++c)
    for (std::size_t f = 0; f < factors.size(); ++f) m[f][t.choice[c][f]] += w[c];
  return m;
}

void require_no_ball(const SubdiffSet& s) {
  if (s.ball_radius() != 0.0) throw PreconditionError("subdifferentials with a ball part are not supported in KKT sums");
}

}  // namespace

KktSolution solve_kkt_system(const KktSystem& sys, const ResidualOptions& opts) {
  const int n = sys.n;
  const std::size_t m = sys.f_sets.size();
  for (const auto& s : sys.f_sets) require_no_ball(s);
  for (const auto& s : sys.g_sets) require_no_ball(s);

  FactoredSum fs;
  fs.dim = n;

  // objectives
  std::vector<std::size_t> block_owner;
  std::vector<Factor> f_factors;
  Tuples f_tuples;
  if (sys.lambda) {
    double ball = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double li = (*sys.lambda)[static_cast<Eigen::Index>(i)];
      ball += li * (sys.uniform_ball ? *sys.uniform_ball : sys.xi[static_cast<Eigen::Index>(i)]);
      if (li > 0.0) f_factors.push_back({i, li, &sys.f_sets[i].generators()});
    }
    f_tuples = minkowski(f_factors, n, Vector());
    fs.simplex_blocks.push_back({"lambda-weighted objectives", f_tuples.points, ball});
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      if (!sys.f_enabled.empty() && !sys.f_enabled[i]) continue;
      const double coeff = sys.uniform_ball ? *sys.uniform_ball : sys.xi[static_cast<Eigen::Index>(i)];
      fs.simplex_blocks.push_back({"f" + std::to_string(i + 1), sys.f_sets[i].generators(), coeff});
      block_owner.push_back(i);
    }
  }

  // constraints and fixed terms
  std::vector<Factor> g_factors;
  Tuples g_tuples;
  const bool has_fixed = sys.fixed.size() == n;
  if (sys.mu) {
    for (std::size_t k = 0; k < sys.g_refs.size(); ++k)
      if ((*sys.mu)[k] > 0.0) g_factors.push_back({k, (*sys.mu)[k], &sys.g_sets[k].generators()});
    if (!g_factors.empty() || has_fixed) {
      g_tuples = minkowski(g_factors, n, has_fixed ? sys.fixed : Vector());
      fs.offset = g_tuples.points;
    }
  } else {
    for (std::size_t k = 0; k < sys.g_refs.size(); ++k)
      fs.cone_blocks.push_back({"g" + std::to_string(k), sys.g_sets[k].generators()});
    if (has_fixed) fs.offset = {sys.fixed};
  }
  const std::size_t extra_block = fs.cone_blocks.size();
  if (!sys.extra_cone.empty()) fs.cone_blocks.push_back({"extra", sys.extra_cone});
  fs.fixed_cone = sys.normal_generators;

  const ResidualResult res = residual_min(fs, opts);

  KktSolution out;
  Certificate& c = out.cert;
  c.anchor = sys.anchor;
  c.xi = sys.xi;
  c.lambda = Vector::Zero(static_cast<Eigen::Index>(m));
  c.objective_subgradients.resize(m);

  if (sys.lambda) {
    c.lambda = *sys.lambda;
    const auto marg = marginals(f_factors, f_tuples, res.simplex_weights.front());
    for (std::size_t i = 0; i < m; ++i)
      c.objective_subgradients[i] = make_point(sys.f_sets[i].generators(), {});
    for (std::size_t f = 0; f < f_factors.size(); ++f)
      c.objective_subgradients[f_factors[f].owner] = make_point(*f_factors[f].gens, marg[f]);
  } else {
    std::vector<double> mass = res.block_mass();
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) c.objective_subgradients[i] = make_point(sys.f_sets[i].generators(), {});
    for (std::size_t b = 0; b < block_owner.size(); ++b) {
      const std::size_t i = block_owner[b];
      c.lambda[static_cast<Eigen::Index>(i)] = total > 0.0 ? mass[b] / total : 0.0;
      c.objective_subgradients[i] = make_point(sys.f_sets[i].generators(), res.simplex_weights[b]);
    }
  }

  c.fixed_term = has_fixed ? sys.fixed : Vector::Zero(n);
  if (sys.mu) {
    const auto marg = marginals(g_factors, g_tuples, res.offset_weights);
    std::vector<WeightedPoint> pts;
    for (std::size_t k = 0; k < sys.g_refs.size(); ++k) pts.push_back(make_point(sys.g_sets[k].generators(), {}));
    for (std::size_t f = 0; f < g_factors.size(); ++f) pts[g_factors[f].owner] = make_point(*g_factors[f].gens, marg[f]);
    for (std::size_t k = 0; k < sys.g_refs.size(); ++k) {
      c.mu.entries.push_back({sys.g_refs[k], (*sys.mu)[k]});
      c.constraint_subgradients.push_back(std::move(pts[k]));
    }
  } else {
    for (std::size_t k = 0; k < sys.g_refs.size(); ++k) {
      const auto& w = res.cone_weights[k];
      const double mu = std::accumulate(w.begin(), w.end(), 0.0);
      if (mu <= 0.0) continue;
      c.mu.entries.push_back({sys.g_refs[k], mu});
      c.constraint_subgradients.push_back(make_point(sys.g_sets[k].generators(), w));
    }
  }
  if (!sys.extra_cone.empty()) {
    out.extra_weights = res.cone_weights[extra_block];
    for (std::size_t k = 0; k < sys.extra_cone.size(); ++k) c.fixed_term += out.extra_weights[k] * sys.extra_cone[k];
  }

  c.normal_generators = sys.normal_generators;
  c.normal_weights = res.fixed_cone_weights;
  c.normal = Vector::Zero(n);
  for (std::size_t k = 0; k < c.normal_generators.size(); ++k) c.normal += c.normal_weights[k] * c.normal_generators[k];

  c.ball = res.ball;
  c.ball_bound = res.ball_radius;
  c.lower_bound = res.lower_bound;
  c.converged = res.converged;
  c.solves = res.solves;
  c.residual = c.recompute_residual();
  return out;
}

Verdict classify_residual(const Certificate& c, double tol) {
  if (c.residual <= tol) return Verdict::Certified;
  if (c.lower_bound > tol) return Verdict::Refuted;
  return Verdict::Inconclusive;
}

}  // namespace sivo::detail
