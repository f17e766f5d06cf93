#include "report.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace sivo::cli {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const std::vector<Vector>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

Json to_json(const Matrix& M) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(to_json(Vector(M.row(i).transpose())));
  return a;
}

Json to_json(const Tolerances& tol) {
  return Json{{"feasibility", tol.feasibility},         {"activity", tol.activity},
              {"complementarity", tol.complementarity}, {"certificate", tol.certificate},
              {"strict_margin", tol.strict_margin},     {"strict_convexity", tol.strict_convexity},
              {"max_iter", tol.max_iter}};
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (j.empty()) return Matrix();
  Matrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) M.row(static_cast<Eigen::Index>(i)) = vector_from_json(j[i]).transpose();
  return M;
}

namespace {

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double d : v) a.push_back(d);
  return a;
}

std::vector<double> doubles_from(const Json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

Json weighted_json(const WeightedPoint& w) {
  return Json{{"generators", to_json(w.generators)}, {"weights", doubles(w.weights)}, {"value", to_json(w.value)}};
}

}  // namespace

Json index_json(const Problem& P, const IndexRef& r) {
  return Json{{"family", r.family}, {"label", P.label(r)}, {"t", to_json(P.t_of(r))}};
}

Json certificate_json(const Problem& P, const Certificate& c) {
  Json mu = Json::array();
  for (const auto& e : c.mu.entries) {
    Json j = index_json(P, e.index);
    j["weight"] = e.weight;
    mu.push_back(std::move(j));
  }
  Json zs = Json::array();
  for (const auto& w : c.objective_subgradients) zs.push_back(weighted_json(w));
  Json xs = Json::array();
  for (const auto& w : c.constraint_subgradients) xs.push_back(weighted_json(w));
  return Json{{"kind", "kkt-certificate"},
              {"anchor", to_json(c.anchor)},
              {"xi", to_json(c.xi)},
              {"verdict", to_string(c.verdict)},
              {"residual", c.residual},
              {"lower_bound", c.lower_bound},
              {"converged", c.converged},
              {"solves", c.solves},
              {"lambda", to_json(c.lambda)},
              {"mu", std::move(mu)},
              {"objective_subgradients", std::move(zs)},
              {"constraint_subgradients", std::move(xs)},
              {"ball", to_json(c.ball)},
              {"ball_bound", c.ball_bound},
              {"normal_generators", to_json(c.normal_generators)},
              {"normal_weights", doubles(c.normal_weights)},
              {"normal", to_json(c.normal)},
              {"fixed_term", to_json(c.fixed_term)},
              {"residual_vector", to_json(c.residual_vector())},
              {"note", c.note}};
}

Json fuzzy_json(const Problem& P, const FuzzyCertificate& fc) {
  Json active = Json::array();
  for (int i : fc.psi_active) active.push_back(i + 1);
  Json argmax = Json::array();
  for (const auto& r : fc.argmax) argmax.push_back(index_json(P, r));
  return Json{{"verdict", to_string(fc.verdict)},
              {"delta", fc.delta},
              {"x_delta", to_json(fc.x_delta)},
              {"f_x_delta", to_json(P.objective_values(fc.x_delta))},
              {"psi", fc.psi},
              {"psi_active", std::move(active)},
              {"argmax", std::move(argmax)},
              {"slacks", doubles(fc.slacks)},
              {"inclusion", certificate_json(P, fc.inclusion)},
              {"note", fc.note}};
}

Json cq_json(const CqResult& r, const std::string& condition) {
  Json sets = Json::array();
  for (std::size_t k = 0; k < r.set_labels.size(); ++k)
    sets.push_back(Json{{"label", r.set_labels[k]}, {"support", r.support_values[k]}});
  return Json{{"kind", "cq-witness"},
              {"condition", condition},
              {"holds", r.holds},
              {"vacuous", r.vacuous},
              {"direction", to_json(r.direction)},
              {"margin", r.margin},
              {"sets", std::move(sets)},
              {"note", r.note}};
}

Json classification_json(const Problem& P, const ClassificationReport& r) {
  const Vector fbar = P.objective_values(r.anchor);
  Json notions = Json::array();
  for (const auto& v : r.notions) {
    Json j{{"notion", to_string(v.notion)}, {"holds", v.holds}};
    if (!v.holds) {
      const Vector f = P.objective_values(v.witness);
      j["witness"] = Json{{"kind", "notion-witness"},
                          {"notion", to_string(v.notion)},
                          {"grid_index", *v.witness_index},
                          {"x", to_json(v.witness)},
                          {"f_x", to_json(f)},
                          {"f_anchor", to_json(fbar)},
                          {"shift", to_json(Vector(v.shifted_difference - f + fbar))},
                          {"shifted_difference", to_json(v.shifted_difference)},
                          {"slack", r.slack},
                          {"reverified", v.reverified}};
    }
    notions.push_back(std::move(j));
  }
  return Json{{"anchor", to_json(r.anchor)},
              {"xi", to_json(r.xi)},
              {"slack", r.slack},
              {"grid_size", r.grid_size},
              {"notions", std::move(notions)}};
}

Json section_json(const SectionResult& s) {
  Json scales = Json::array();
  for (std::size_t k = 0; k < s.scales.size(); ++k)
    scales.push_back(Json{{"scale", s.scales[k]}, {"infimum", to_json(s.infima[k])}, {"points", s.section_sizes[k]}});
  return Json{{"bounded", s.bounded}, {"empty", s.empty}, {"bound", to_json(s.bound)}, {"scales", std::move(scales)},
              {"note", s.note}};
}

Json convexity_json(const Problem& P, const GenConvexityResult& r) {
  Json j{{"falsified", r.falsified},
         {"capped", r.capped},
         {"samples_checked", r.samples_checked},
         {"programs_solved", r.programs_solved},
         {"note", r.note}};
  if (r.falsified) {
    Json cons = Json::array();
    for (const auto& c : r.constraints) cons.push_back(index_json(P, c));
    j["counterexample"] = Json{{"kind", "convexity-certificate"},
                               {"x", to_json(r.x)},
                               {"z", to_json(r.z)},
                               {"constraints", std::move(cons)},
                               {"x_t", to_json(r.x_t)},
                               {"row_q", to_json(r.row_q)},
                               {"row_b", doubles(r.row_b)},
                               {"row_weights", doubles(r.row_weights)},
                               {"radius", r.radius},
                               {"normal_generators", to_json(r.normal_generators)},
                               {"normal_weights", doubles(r.normal_weights)},
                               {"dual_value", r.dual_value}};
  } else if (r.nu.size() > 0) {
    j["last_direction"] = to_json(r.nu);
  }
  return j;
}

Json sufficiency_json(const Problem& P, const SufficiencyResult& r) {
  Json j{{"status", to_string(r.status)}, {"verdict", to_string(r.verdict)}, {"summary", r.summary},
         {"kkt", certificate_json(P, r.kkt)}};
  if (r.convexity) j["convexity"] = convexity_json(P, *r.convexity);
  return j;
}

Json sdp_json(const Problem& P, const SdpCertificate& s) {
  return Json{{"kind", "sdp-multiplier"},
              {"Lambda", to_json(s.Lambda)},
              {"lambda_min_eig", s.lambda_min_eig},
              {"complementarity", s.complementarity},
              {"g_max_eig", s.g_max_eig},
              {"active_rank", s.active_rank},
              {"exact_search", s.exact_search},
              {"certificate", certificate_json(P, s.cert)}};
}

Json grid_point_json(const GridPoint& g) {
  return Json{{"grid_index", g.index}, {"x", to_json(g.x)}, {"f_x", to_json(g.f)}};
}

Json ekeland_json(const EkelandResult& e) {
  return Json{{"x", to_json(e.x)}, {"f_x", to_json(e.f)}, {"iterations", e.iterations}, {"path", to_json(e.path)}};
}

namespace {

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

class Verifier {
 public:
  explicit Verifier(double tol) : tol_(tol) {}

  void walk(const Json& j, const std::string& path) {
    if (j.is_object()) {
      if (auto k = j.find("kind"); k != j.end() && k->is_string()) {
        const std::string kind = k->get<std::string>();
        try {
          if (kind == "kkt-certificate") kkt(j, path);
          else if (kind == "convexity-certificate") convexity(j, path);
          else if (kind == "cq-witness") cq(j, path);
          else if (kind == "notion-witness") notion(j, path);
          else if (kind == "sdp-multiplier") sdp(j, path);
        } catch (const nlohmann::json::exception& e) {
          fail(path, std::string("malformed witness: ") + e.what());
        }
      }
      for (const auto& [key, val] : j.items()) walk(val, path + "/" + key);
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) walk(j[i], path + "/" + std::to_string(i));
    }
  }

  VerifyOutcome outcome;

 private:
  void fail(const std::string& path, const std::string& what) { outcome.failures.push_back(path + ": " + what); }

  void expect(bool ok, const std::string& path, const std::string& what) {
    ++outcome.checked;
    if (!ok) fail(path, what);
  }

  static std::string num(double d) {
    std::ostringstream s;
    s.precision(17);
    s << d;
    return s.str();
  }

  Vector weighted_value(const Json& w, const std::string& path) {
    const std::vector<double> weights = doubles_from(w.at("weights"));
    const Vector value = vector_from_json(w.at("value"));
    Vector s = Vector::Zero(value.size());
    double mass = 0.0, scale = 1.0;
    const Json& gens = w.at("generators");
    expect(gens.size() == weights.size(), path, "generator and weight counts differ");
    for (std::size_t k = 0; k < std::min(gens.size(), weights.size()); ++k) {
      const Vector g = vector_from_json(gens[k]);
      expect(g.size() == value.size(), path, "generator dimension mismatch");
      if (g.size() != value.size()) continue;
      s += weights[k] * g;
      mass += weights[k];
      scale = std::max(scale, max_abs(g));
      expect(weights[k] >= -tol_, path, "negative weight " + num(weights[k]));
    }
    expect(std::abs(mass - 1.0) <= tol_ * weights.size(), path, "weights sum to " + num(mass));
    expect((s - value).norm() <= tol_ * scale, path, "value differs from the weighted generators by " + num((s - value).norm()));
    return value;
  }

  void kkt(const Json& c, const std::string& path) {
    const Vector lambda = vector_from_json(c.at("lambda"));
    const Vector ball = vector_from_json(c.at("ball"));
    const Eigen::Index n = ball.size();
    Vector r = ball;

    if (lambda.size() > 0) {
      expect(lambda.minCoeff() >= -tol_, path, "lambda has a negative entry");
      expect(std::abs(lambda.sum() - 1.0) <= tol_ * lambda.size(), path, "lambda does not sum to one");
    }
    const Json& zs = c.at("objective_subgradients");
    expect(zs.size() == static_cast<std::size_t>(lambda.size()), path, "one subgradient per objective expected");
    for (std::size_t i = 0; i < zs.size() && i < static_cast<std::size_t>(lambda.size()); ++i)
      r += lambda[static_cast<Eigen::Index>(i)] * weighted_value(zs[i], path + "/objective_subgradients/" + std::to_string(i));

    const Json& mu = c.at("mu");
    const Json& xs = c.at("constraint_subgradients");
    expect(mu.size() == xs.size(), path, "one subgradient per multiplier entry expected");
    for (std::size_t k = 0; k < mu.size() && k < xs.size(); ++k) {
      const double w = mu[k].at("weight").get<double>();
      expect(w >= 0.0, path, "negative constraint multiplier");
      r += w * weighted_value(xs[k], path + "/constraint_subgradients/" + std::to_string(k));
    }

    const double ball_bound = c.at("ball_bound").get<double>();
    expect(ball.norm() <= ball_bound * (1.0 + tol_) + tol_, path,
           "ball element norm " + num(ball.norm()) + " exceeds bound " + num(ball_bound));

    const Json& ng = c.at("normal_generators");
    const std::vector<double> nw = doubles_from(c.at("normal_weights"));
    const Vector normal = vector_from_json(c.at("normal"));
    expect(ng.size() == nw.size(), path, "normal generator and weight counts differ");
    Vector ns = Vector::Zero(n);
    for (std::size_t k = 0; k < std::min(ng.size(), nw.size()); ++k) {
      expect(nw[k] >= -tol_, path, "negative normal-cone weight");
      ns += nw[k] * vector_from_json(ng[k]);
    }
    expect((ns - normal).norm() <= tol_ * (1.0 + max_abs(normal)), path, "normal vector differs from its generators");
    r += normal;
    const Vector fixed = vector_from_json(c.at("fixed_term"));
    if (fixed.size() == n) r += fixed;

    const double residual = c.at("residual").get<double>();
    expect(std::abs(r.norm() - residual) <= tol_, path,
           "recomputed residual " + num(r.norm()) + " differs from reported " + num(residual));
  }

  void convexity(const Json& c, const std::string& path) {
    const Json& q = c.at("row_q");
    const std::vector<double> b = doubles_from(c.at("row_b"));
    const std::vector<double> y = doubles_from(c.at("row_weights"));
    const Json& w = c.at("normal_generators");
    const std::vector<double> d = doubles_from(c.at("normal_weights"));
    const double radius = c.at("radius").get<double>();
    expect(q.size() == b.size() && b.size() == y.size() && w.size() == d.size() && !q.empty(), path,
           "inconsistent certificate sizes");
    if (q.empty() || q.size() != y.size() || b.size() != y.size() || w.size() != d.size()) return;
    Vector s = Vector::Zero(static_cast<Eigen::Index>(q[0].size()));
    double sb = 0.0, mass = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      expect(y[j] >= -tol_, path, "negative row weight");
      s += y[j] * vector_from_json(q[j]);
      sb += y[j] * b[j];
      mass += y[j];
    }
    for (std::size_t l = 0; l < w.size(); ++l) {
      expect(d[l] >= -tol_, path, "negative normal-cone weight");
      s += d[l] * vector_from_json(w[l]);
    }
    expect(std::abs(mass - 1.0) <= tol_ * y.size(), path, "row weights do not sum to one");
    const double value = radius * s.norm() + sb;
    const double reported = c.at("dual_value").get<double>();
    expect(std::abs(value - reported) <= tol_ * (1.0 + std::abs(reported)), path,
           "recomputed dual value " + num(value) + " differs from reported " + num(reported));
    expect(value < 0.0, path, "dual value is not negative");
  }

  void cq(const Json& c, const std::string& path) {
    if (c.at("vacuous").get<bool>()) return;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : c.at("sets")) worst = std::max(worst, s.at("support").get<double>());
    const double margin = c.at("margin").get<double>();
    if (!c.at("sets").empty())
      expect(std::abs(-worst - margin) <= tol_ * (1.0 + std::abs(margin)), path, "margin differs from the supports");
    if (c.at("holds").get<bool>()) expect(margin > 0.0, path, "condition holds without a positive margin");
  }

  void notion(const Json& c, const std::string& path) {
    const Vector f = vector_from_json(c.at("f_x"));
    const Vector fbar = vector_from_json(c.at("f_anchor"));
    const Vector shift = vector_from_json(c.at("shift"));
    const Vector diff = vector_from_json(c.at("shifted_difference"));
    const double slack = c.at("slack").get<double>();
    expect((f + shift - fbar - diff).norm() <= tol_ * (1.0 + max_abs(diff)), path, "shifted difference does not add up");
    const std::string name = c.at("notion").get<std::string>();
    const bool weak = name.find("weak") != std::string::npos;
    const Vector d = -diff;
    const bool violated = weak ? d.minCoeff() > slack : (d.minCoeff() >= 0.0 && d.maxCoeff() > slack);
    expect(violated, path, "witness does not violate " + name);
  }

  void sdp(const Json& c, const std::string& path) {
    const Matrix L = matrix_from_json(c.at("Lambda"));
    if (L.size() == 0) return;
    const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (L + L.transpose())).eigenvalues().minCoeff();
    expect(std::abs(min_eig - c.at("lambda_min_eig").get<double>()) <= tol_ * (1.0 + L.norm()), path,
           "reported smallest eigenvalue of Lambda does not reproduce");
  }

  double tol_;
};

}  // namespace

VerifyOutcome verify_report(const Json& report, double tol) {
  Verifier v(tol);
  v.walk(report, "");
  return v.outcome;
}

}  // namespace sivo::cli
