#include "sivo/certificates.hpp"

#include "kkt_system.hpp"
#include "sivo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sivo {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return "certified";
    case Verdict::Refuted:
      return "refuted";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(SufficiencyResult::Status s) {
  switch (s) {
    case SufficiencyResult::Status::Satisfied:
      return "sufficient-conditions-satisfied (sampled)";
    case SufficiencyResult::Status::KktFails:
      return "kkt-fails";
    case SufficiencyResult::Status::KktInconclusive:
      return "kkt-inconclusive";
    case SufficiencyResult::Status::ConvexityFalsified:
      return "sufficiency-not-established (generalized convexity falsified)";
  }
  return "";
}

double WeightedPoint::consistency_error() const {
  Vector s = Vector::Zero(value.size());
  double mass = 0.0, neg = 0.0;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    s += weights[k] * generators[k];
    mass += weights[k];
    neg = std::max(neg, -weights[k]);
  }
  return std::max({(s - value).norm(), std::abs(mass - 1.0), neg});
}

Vector Certificate::residual_vector() const {
  Vector r = ball + normal;
  if (fixed_term.size() == r.size()) r += fixed_term;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    r += lambda[i] * objective_subgradients[static_cast<std::size_t>(i)].value;
  for (std::size_t k = 0; k < mu.entries.size(); ++k) r += mu.entries[k].weight * constraint_subgradients[k].value;
  return r;
}

namespace {

void require_point(const Problem& P, const Vector& x, const char* what) {
  if (x.size() != P.n())
    throw PreconditionError(std::string(what) + " has dimension " + std::to_string(x.size()) + ", expected " +
                            std::to_string(P.n()));
}

void require_xi(const Problem& P, const Vector& xi) {
  if (xi.size() != P.m())
    throw PreconditionError("xi has " + std::to_string(xi.size()) + " entries, expected " + std::to_string(P.m()));
  for (Eigen::Index i = 0; i < xi.size(); ++i)
    if (!(xi[i] >= 0.0)) throw PreconditionError("xi must be componentwise nonnegative");
}

void require_feasible(const Problem& P, const Vector& x, const Tolerances& tol) {
  const Feasibility f = is_feasible(P, x, tol.feasibility);
  if (!f.feasible)
    throw PreconditionError("point " + format_vector(x) + " is infeasible (violation " + std::to_string(f.worst_violation) +
                            ")");
}

std::vector<SubdiffSet> objective_sets(const Problem& P, const Vector& x, double act) {
  std::vector<SubdiffSet> out;
  for (const auto& f : P.objectives()) out.push_back(f.clarke_subdiff(x, Vector(), act));
  return out;
}

std::vector<IndexRef> argmax_indices(const Problem& P, const Vector& x, double act) {
  const double G = gmax(P, x);
  if (!std::isfinite(G)) return {};
  return active_indices(P, x, act * (1.0 + std::abs(G)));
}

ResidualOptions residual_options(const Tolerances& tol) { return ResidualOptions{tol.certificate, tol.max_iter}; }

}  // namespace

Certificate check_kkt(const Problem& P, const Vector& xbar, const Vector& xi, const KktOptions& opts) {
  const Tolerances& tol = opts.tol;
  require_point(P, xbar, "point");
  require_xi(P, xi);
  require_feasible(P, xbar, tol);

  detail::KktSystem sys;
  sys.n = P.n();
  sys.anchor = xbar;
  sys.xi = xi;
  sys.f_sets = objective_sets(P, xbar, tol.activity);
  sys.normal_generators = P.omega().normal_cone(xbar, tol.activity).generators;

  if (opts.lambda) {
    const Vector& l = *opts.lambda;
    if (l.size() != P.m()) throw PreconditionError("lambda has the wrong number of entries");
    if (l.minCoeff() < 0.0 || std::abs(l.sum() - 1.0) > 1e-9)
      throw PreconditionError("lambda must be nonnegative and sum to 1");
    sys.lambda = l;
  }

  std::string note;
  if (opts.mu) {
    if (!opts.mu->nonnegative()) throw PreconditionError("mu must be nonnegative");
    std::vector<double> w;
    for (const auto& e : opts.mu->entries) {
      if (e.index.family >= P.constraints().size() ||
          e.index.point >= P.constraints()[e.index.family].domain.grid().size())
        throw PreconditionError("mu refers to a constraint outside the problem");
      sys.g_refs.push_back(e.index);
      sys.g_sets.push_back(P.g_subdiff(e.index, xbar, tol.activity));
      w.push_back(e.weight);
    }
    sys.mu = std::move(w);
  } else {
    sys.g_refs = binding_indices(P, xbar, tol.activity);
    for (const auto& r : sys.g_refs) sys.g_sets.push_back(P.g_subdiff(r, xbar, tol.activity));
  }

  Certificate c = detail::solve_kkt_system(sys, residual_options(tol)).cert;
  c.verdict = detail::classify_residual(c, tol.certificate);

  const double gap = c.mu.complementarity_gap(P, xbar);
  if (gap > tol.complementarity) {
    c.verdict = Verdict::Refuted;
    note = "mu violates complementarity (max |mu_t g_t| = " + std::to_string(gap) + ")";
  }
  if (xi.maxCoeff() == 0.0) note += std::string(note.empty() ? "" : "; ") + "xi = 0: exact inclusion without ball term";
  if (c.verdict == Verdict::Inconclusive) note += std::string(note.empty() ? "" : "; ") + "solver gap too large to decide";
  c.note = note;
  return c;
}

namespace {

struct PsiEval {
  const Problem& P;
  const Vector& xbar;
  const Vector& xi;
  Vector fbar;
  double delta;
  double feas_tol;

  // +inf outside C or the open ball, or where an objective is undefined
  double operator()(const Vector& x) const {
    if ((x - xbar).norm() >= delta * (1.0 - 1e-12)) return std::numeric_limits<double>::infinity();
    try {
      if (!is_feasible(P, x, feas_tol).feasible) return std::numeric_limits<double>::infinity();
      double v = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < P.m(); ++i) v = std::max(v, P.objectives()[static_cast<std::size_t>(i)].eval(x) - fbar[i] + xi[i]);
      return v;
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  }
};

}  // namespace

FuzzyCertificate fuzzy_kkt(const Problem& P, const Vector& xbar, const Vector& xi, double delta,
                           const FuzzyOptions& opts) {
  const Tolerances& tol = opts.tol;
  require_point(P, xbar, "point");
  require_xi(P, xi);
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
  if (xi.maxCoeff() == 0.0) throw PreconditionError("xi must be nonzero");
  require_feasible(P, xbar, tol);

  const int n = P.n();
  PsiEval psi{P, xbar, xi, P.objective_values(xbar), delta, tol.feasibility};

  // seeding scan of the cube around xbar, clipped to the ball
  int res = opts.scan_resolution;
  if (res <= 0) res = n == 1 ? 401 : n == 2 ? 41 : n == 3 ? 13 : 5;
  std::vector<std::pair<double, Vector>> seeds{{psi(xbar), xbar}};
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    Vector x = xbar;
    for (int j = 0; j < n; ++j) x[j] += delta * (-1.0 + 2.0 * idx[static_cast<std::size_t>(j)] / (res - 1));
    const double v = psi(x);
    if (std::isfinite(v)) seeds.emplace_back(v, x);
    int j = n - 1;
    for (; j >= 0; --j) {
      if (++idx[static_cast<std::size_t>(j)] < res) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
    if (j < 0) break;
  }
  std::stable_sort(seeds.begin() + 1, seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (static_cast<int>(seeds.size()) > opts.starts + 1) seeds.resize(static_cast<std::size_t>(opts.starts + 1));

  // coordinate pattern search from each seed
  Vector best = xbar;
  double best_val = seeds.front().first;
  for (const auto& [v0, x0] : seeds) {
    Vector x = x0;
    double v = v0;
    double h = 2.0 * delta / (res - 1);
    for (int it = 0; it < 100000 && h > 1e-13 * (1.0 + delta); ++it) {
      bool moved = false;
      for (int j = 0; j < n && !moved; ++j)
        for (double s : {-1.0, 1.0}) {
          Vector y = x;
          y[j] += s * h;
          const double vy = psi(y);
          if (vy < v) {
            x = std::move(y);
            v = vy;
            moved = true;
            break;
          }
        }
      if (!moved) h *= 0.5;
    }
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }

  FuzzyCertificate fc;
  fc.delta = delta;
  fc.x_delta = best;
  fc.psi = best_val;
  const Vector fd = P.objective_values(best);
  std::vector<char> enabled(static_cast<std::size_t>(P.m()), 0);
  for (int i = 0; i < P.m(); ++i)
    if (fd[i] - psi.fbar[i] + xi[i] >= best_val - tol.activity * (1.0 + std::abs(best_val))) {
      enabled[static_cast<std::size_t>(i)] = 1;
      fc.psi_active.push_back(i);
    }
  fc.argmax = argmax_indices(P, best, tol.activity);

  detail::KktSystem sys;
  sys.n = n;
  sys.anchor = best;
  sys.xi = xi;
  sys.f_sets = objective_sets(P, best, tol.activity);
  sys.f_enabled = enabled;
  sys.uniform_ball = xi.maxCoeff() / delta;
  sys.g_refs = fc.argmax;
  for (const auto& r : sys.g_refs) sys.g_sets.push_back(P.g_subdiff(r, best, tol.activity));
  sys.normal_generators = P.omega().normal_cone(best, tol.activity).generators;

  fc.inclusion = detail::solve_kkt_system(sys, residual_options(tol)).cert;
  fc.inclusion.verdict = detail::classify_residual(fc.inclusion, tol.certificate);

  double worst_slack = 0.0;
  for (int i = 0; i < P.m(); ++i) {
    const double s = fc.inclusion.lambda[i] * (fd[i] - psi.fbar[i] + xi[i] - best_val);
    fc.slacks.push_back(s);
    worst_slack = std::max(worst_slack, std::abs(s));
  }
  if (fc.inclusion.verdict == Verdict::Certified && worst_slack <= tol.complementarity) {
    fc.verdict = Verdict::Certified;
  } else {
    fc.verdict = Verdict::Inconclusive;
    fc.note = fc.inclusion.verdict != Verdict::Certified
                  ? "inclusion not reached at the located minimizer (delta may be too large or the search stalled)"
                  : "complementarity slack exceeds tolerance";
  }
  return fc;
}

namespace {

CqResult strict_decrease(const std::vector<SubdiffSet>& sets, std::vector<std::string> labels, const TangentCone& cone,
                         const Tolerances& tol) {
  CqResult r;
  r.set_labels = std::move(labels);
  if (sets.empty()) {
    r.holds = true;
    r.vacuous = true;
    r.direction = Vector::Zero(cone.dim);
    r.margin = std::numeric_limits<double>::infinity();
    r.note = "nothing to decrease";
    return r;
  }
  std::vector<std::vector<Vector>> gens;
  for (const auto& s : sets) gens.push_back(s.generators());
  const StrictDirection sd = strict_direction_lp(gens, cone, tol.strict_margin);
  r.direction = sd.direction;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : sets) {
    r.support_values.push_back(support(s, sd.direction));
    worst = std::max(worst, r.support_values.back());
  }
  r.margin = -worst;
  r.holds = sd.feasible && r.margin > tol.strict_margin && cone.contains(sd.direction, 1e-12);
  r.note = sd.diagnostics;
  return r;
}

}  // namespace

CqResult check_cq_U(const Problem& P, const Vector& xbar, const Tolerances& tol) {
  require_point(P, xbar, "point");
  if (!P.omega().contains(xbar, tol.feasibility)) throw PreconditionError("point is not in Omega");
  std::vector<SubdiffSet> sets;
  std::vector<std::string> labels;
  for (const auto& r : argmax_indices(P, xbar, tol.activity)) {
    sets.push_back(P.g_subdiff(r, xbar, tol.activity));
    labels.push_back(P.label(r));
  }
  CqResult res = strict_decrease(sets, std::move(labels), P.omega().tangent_cone(xbar, tol.activity), tol);
  if (res.vacuous) res.note = "no constraints";
  return res;
}

CqResult check_cq_Ai(const Problem& P, const Vector& xbar, int i, const Tolerances& tol) {
  require_point(P, xbar, "point");
  if (i < 0 || i >= P.m()) throw PreconditionError("objective index out of range");
  if (!P.omega().contains(xbar, tol.feasibility)) throw PreconditionError("point is not in Omega");
  std::vector<SubdiffSet> sets;
  std::vector<std::string> labels;
  for (const auto& r : argmax_indices(P, xbar, tol.activity)) {
    sets.push_back(P.g_subdiff(r, xbar, tol.activity));
    labels.push_back(P.label(r));
  }
  bool hull_estimate = false;
  for (int k = 0; k < P.m(); ++k) {
    if (k == i) continue;
    sets.push_back(P.objectives()[static_cast<std::size_t>(k)].clarke_subdiff(xbar, Vector(), tol.activity));
    hull_estimate = hull_estimate || sets.back().generators().size() > 1;
    labels.push_back("f" + std::to_string(k + 1));
  }
  CqResult res = strict_decrease(sets, std::move(labels), P.omega().tangent_cone(xbar, tol.activity), tol);
  if (!res.holds && hull_estimate) res.note += " (fails under hull estimate)";
  return res;
}

namespace {

// Min-norm element first, then the vertices.
std::vector<Vector> subgradient_candidates(const SubdiffSet& s) {
  std::vector<Vector> out;
  const auto& g = s.generators();
  if (g.size() > 1) {
    const ShiftedHullResult mn =
        min_shifted_norm(g, std::vector<double>(g.size(), 0.0), {}, static_cast<int>(s.dim()));
    // clear rounding noise so that an exact zero subgradient is reported as such
    double scale = 0.0;
    for (const auto& v : g) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    Vector z = mn.combination;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (std::abs(z[i]) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) z[i] = 0.0;
    out.push_back(std::move(z));
  }
  for (const auto& v : g)
    if (std::none_of(out.begin(), out.end(), [&](const Vector& u) { return (u - v).norm() <= 1e-15; }))
      out.push_back(v);
  return out;
}

struct Row {
  Vector q;
  double b;
};

}  // namespace

GenConvexityResult check_gen_convexity(const Problem& P, const Vector& xbar, const std::vector<Vector>& samples,
                                       const GenConvexityOptions& opts) {
  const Tolerances& tol = opts.tol;
  require_point(P, xbar, "point");
  if (!P.omega().contains(xbar, tol.feasibility)) throw PreconditionError("point is not in Omega");
  for (const auto& x : samples) {
    require_point(P, x, "sample point");
    if (!P.omega().contains(x, tol.feasibility))
      throw PreconditionError("sample point " + format_vector(x) + " is not in Omega");
  }

  const int n = P.n();
  const int m = P.m();
  const std::vector<IndexRef> refs = binding_indices(P, xbar, tol.activity);
  std::vector<std::vector<Vector>> cand;
  for (const auto& f : P.objectives()) cand.push_back(subgradient_candidates(f.clarke_subdiff(xbar, Vector(), tol.activity)));
  for (const auto& r : refs) cand.push_back(subgradient_candidates(P.g_subdiff(r, xbar, tol.activity)));

  std::size_t total = 1;
  bool capped = false;
  for (const auto& c : cand) {
    if (total > opts.max_combinations / std::max<std::size_t>(c.size(), 1)) {
      capped = true;
      total = opts.max_combinations;
      break;
    }
    total *= c.size();
  }

  const Vector fbar = P.objective_values(xbar);
  std::vector<double> gbar;
  for (const auto& r : refs) gbar.push_back(P.g(r, xbar));
  std::vector<Vector> normals = P.omega().normal_cone(xbar, tol.activity).generators;
  const TangentCone tcone = P.omega().tangent_cone(xbar, tol.activity);

  // values at the samples do not depend on the combination
  std::vector<Vector> fx;
  std::vector<std::vector<double>> gx;
  for (const auto& x : samples) {
    fx.push_back(P.objective_values(x));
    std::vector<double> gv;
    for (const auto& r : refs) gv.push_back(P.g(r, x));
    gx.push_back(std::move(gv));
  }

  GenConvexityResult out;
  out.capped = capped;
  out.constraints = refs;
  std::vector<std::size_t> choice(cand.size(), 0);

  for (std::size_t combo = 0; combo < total; ++combo) {
    std::vector<Vector> pick;
    for (std::size_t s = 0; s < cand.size(); ++s) pick.push_back(cand[s][choice[s]]);

    for (std::size_t si = 0; si < samples.size(); ++si) {
      const Vector& x = samples[si];
      const double R = (x - xbar).norm();
      if (opts.strict && R == 0.0) continue;
      const double eps = opts.strict ? tol.strict_convexity * (1.0 + R) : 0.0;

      // rows: objectives, then constraints; a constraint row equal to an earlier one keeps the smaller bound
      std::vector<Row> rows;
      for (int i = 0; i < m; ++i) {
        rows.push_back({pick[static_cast<std::size_t>(i)], fx[si][i] - fbar[i] - eps});
      }
      for (std::size_t k = 0; k < refs.size(); ++k) {
        const Vector& q = pick[static_cast<std::size_t>(m) + k];
        const double b = gx[si][k] - gbar[k];
        auto it = std::find_if(rows.begin() + m, rows.end(), [&](const Row& r) { return r.q == q; });
        if (it != rows.end())
          it->b = std::min(it->b, b);
        else
          rows.push_back({q, b});
      }

      double scale = 1.0, qmax = 0.0;
      for (const auto& r : rows) {
        scale = std::max(scale, std::abs(r.b));
        qmax = std::max(qmax, r.q.norm());
      }
      scale += R * qmax;
      auto violation = [&](const Vector& nu) {
        double v = -std::numeric_limits<double>::infinity();
        for (const auto& r : rows) v = std::max(v, r.q.dot(nu) - r.b);
        return v;
      };
      const double accept = 1e-12 * scale;

      // cheap candidates: the chord and the zero direction
      const Vector chord = x - xbar;
      if (tcone.contains(chord, 1e-12) && violation(chord) <= accept) {
        out.nu = chord;
        ++out.samples_checked;
        continue;
      }
      if (violation(Vector::Zero(n)) <= accept) {
        out.nu = Vector::Zero(n);
        ++out.samples_checked;
        continue;
      }

      std::vector<Vector> pts;
      std::vector<double> shifts;
      for (const auto& r : rows) {
        pts.push_back(R * r.q);
        shifts.push_back(-r.b);
      }
      const ShiftedHullResult eng = min_shifted_norm(pts, shifts, normals, n, ResidualOptions{1e-12, tol.max_iter});
      ++out.programs_solved;
      ++out.samples_checked;

      const double sn = eng.combination.norm();
      const Vector nu = sn > 0.0 ? Vector(-R * eng.combination / sn) : Vector::Zero(n);
      if (eng.value >= -1e-10 * scale) {
        out.nu = nu;
        continue;
      }

      out.falsified = true;
      out.x = x;
      out.z.assign(pick.begin(), pick.begin() + m);
      out.x_t.assign(pick.begin() + m, pick.end());
      out.nu = nu;
      for (const auto& r : rows) {
        out.row_q.push_back(r.q);
        out.row_b.push_back(r.b);
      }
      out.row_weights = eng.point_weights;
      out.radius = R;
      out.normal_generators = normals;
      out.normal_weights = eng.ray_weights;
      out.dual_value = eng.value;
      out.note = "no admissible direction for sample " + format_vector(x) + " (dual value " +
                 std::to_string(eng.value) + ")";
      return out;
    }

    for (std::size_t s = cand.size(); s-- > 0;) {
      if (++choice[s] < cand[s].size()) break;
      choice[s] = 0;
    }
  }
  out.note = capped ? "not falsified (sampled combinations, cap reached)" : "not falsified on the samples";
  return out;
}

SufficiencyResult sufficiency_verdict(const Problem& P, const Vector& xbar, const Vector& xi, SufficiencyMode mode,
                                      const std::vector<Vector>& samples, const Tolerances& tol) {
  SufficiencyResult r;
  r.kkt = check_kkt(P, xbar, xi, KktOptions{std::nullopt, std::nullopt, tol});
  if (r.kkt.verdict == Verdict::Refuted) {
    r.status = SufficiencyResult::Status::KktFails;
    r.verdict = Verdict::Refuted;
  } else if (r.kkt.verdict == Verdict::Inconclusive) {
    r.status = SufficiencyResult::Status::KktInconclusive;
    r.verdict = Verdict::Inconclusive;
  } else {
    GenConvexityOptions gopts;
    gopts.strict = mode == SufficiencyMode::Quasi;
    gopts.tol = tol;
    r.convexity = check_gen_convexity(P, xbar, samples, gopts);
    if (r.convexity->falsified) {
      r.status = SufficiencyResult::Status::ConvexityFalsified;
      r.verdict = Verdict::Refuted;
    } else {
      r.status = SufficiencyResult::Status::Satisfied;
      r.verdict = Verdict::Certified;
    }
  }
  r.summary = to_string(r.status);
  return r;
}

}  // namespace sivo
