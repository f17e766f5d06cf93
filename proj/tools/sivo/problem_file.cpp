#include "problem_file.hpp"

#include <sivo/errors.hpp>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace sivo::cli {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

double parse_number(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s == "inf" || s == ".inf" || s == "+inf" || s == "+.inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf" || s == "-.inf") return -std::numeric_limits<double>::infinity();
  const Expr e = Expr::parse(s, 1, 0);
  if (e.depends_on_x()) throw ParseError("a number must not depend on x", 0);
  return e.eval(Vector::Zero(1));
}

namespace {

int line_of(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!node.IsMap()) throw InputError(where + " must be a mapping", line_of(node));
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      throw InputError("unknown key '" + key + "' in " + where + " (allowed: " + list + ")", line_of(kv.first));
    }
  }
}

YAML::Node require(const YAML::Node& node, const char* key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw InputError("missing key '" + std::string(key) + "' in " + where, line_of(node));
  return v;
}

double as_double(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) throw InputError(what + " must be a number", line_of(node));
  try {
    return parse_number(node.Scalar());
  } catch (const Error& e) {
    throw InputError(what + ": cannot read '" + node.Scalar() + "' as a number", line_of(node));
  }
}

int as_int(const YAML::Node& node, const std::string& what) {
  const double v = as_double(node, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InputError(what + " must be an integer", line_of(node));
  return static_cast<int>(v);
}

std::string as_string(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) throw InputError(what + " must be a string", line_of(node));
  return node.Scalar();
}

// A sequence of numbers; a single scalar is read as a 1-vector.
Vector as_vector(const YAML::Node& node, const std::string& what) {
  if (node.IsScalar()) return Vector::Constant(1, as_double(node, what));
  if (!node.IsSequence()) throw InputError(what + " must be a list of numbers", line_of(node));
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_double(node[i], what);
  return v;
}

std::vector<Vector> as_vector_list(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) throw InputError(what + " must be a list", line_of(node));
  std::vector<Vector> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(as_vector(node[i], what));
  return out;
}

Vector sized(Vector v, Eigen::Index n, const YAML::Node& node, const std::string& what) {
  if (v.size() != n)
    throw InputError(what + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n), line_of(node));
  return v;
}

Matrix as_square(const YAML::Node& node, int p, const std::string& what) {
  Matrix M(p, p);
  if (node.IsSequence() && node.size() == static_cast<std::size_t>(p) && p > 0 && node[0].IsSequence()) {
    for (int i = 0; i < p; ++i) M.row(i) = sized(as_vector(node[static_cast<std::size_t>(i)], what), p, node, what).transpose();
    return M;
  }
  const Vector flat = sized(as_vector(node, what), static_cast<Eigen::Index>(p) * p, node, what + " (row-major)");
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) M(i, j) = flat[i * p + j];
  return M;
}

Expr parse_expr(const YAML::Node& node, int n, int k, const std::string& what) {
  const std::string text = as_string(node, what);
  try {
    return Expr::parse(text, n, k);
  } catch (const ParseError& e) {
    throw InputError(what + " '" + text + "': " + e.what(), line_of(node));
  }
}

IndexDomain parse_index(const YAML::Node& node, const std::string& where) {
  if (!node) return IndexDomain::single();
  check_keys(node, {"kind", "points", "a", "b", "lo", "hi", "resolution"}, where);
  const std::string kind = as_string(require(node, "kind", where), where + ".kind");
  try {
    if (kind == "none") return IndexDomain::single();
    if (kind == "finite") return IndexDomain::finite(as_vector_list(require(node, "points", where), where + ".points"));
    if (kind == "interval") {
      const int res = node["resolution"] ? as_int(node["resolution"], where + ".resolution") : IndexDomain::kDefaultResolution;
      return IndexDomain::interval(as_double(require(node, "a", where), where + ".a"),
                                   as_double(require(node, "b", where), where + ".b"), res);
    }
    if (kind == "box") {
      const Vector lo = as_vector(require(node, "lo", where), where + ".lo");
      const Vector hi = as_vector(require(node, "hi", where), where + ".hi");
      std::vector<int> res{IndexDomain::kDefaultResolution};
      if (const YAML::Node r = node["resolution"]) {
        res.clear();
        if (r.IsSequence())
          for (std::size_t i = 0; i < r.size(); ++i) res.push_back(as_int(r[i], where + ".resolution"));
        else
          res.push_back(as_int(r, where + ".resolution"));
      }
      return IndexDomain::box(lo, hi, res);
    }
  } catch (const PreconditionError& e) {
    throw InputError(where + ": " + e.what(), line_of(node));
  }
  throw InputError(where + ".kind must be one of none, finite, interval, box", line_of(node["kind"]));
}

OmegaSet parse_omega(const YAML::Node& node, int n) {
  if (!node) return OmegaSet::whole(n);
  check_keys(node, {"kind", "lower", "upper", "A", "b"}, "omega");
  const std::string kind = as_string(require(node, "kind", "omega"), "omega.kind");
  try {
    if (kind == "whole") return OmegaSet::whole(n);
    if (kind == "box") {
      const Vector lo = node["lower"] ? sized(as_vector(node["lower"], "omega.lower"), n, node["lower"], "omega.lower")
                                      : Vector::Constant(n, -std::numeric_limits<double>::infinity());
      const Vector hi = node["upper"] ? sized(as_vector(node["upper"], "omega.upper"), n, node["upper"], "omega.upper")
                                      : Vector::Constant(n, std::numeric_limits<double>::infinity());
      return OmegaSet::box(lo, hi);
    }
    if (kind == "polyhedron") {
      const std::vector<Vector> rows = as_vector_list(require(node, "A", "omega"), "omega.A");
      const Vector b = as_vector(require(node, "b", "omega"), "omega.b");
      Matrix A(static_cast<Eigen::Index>(rows.size()), n);
      for (std::size_t i = 0; i < rows.size(); ++i)
        A.row(static_cast<Eigen::Index>(i)) = sized(rows[i], n, node["A"], "omega.A row").transpose();
      return OmegaSet::polyhedron(A, sized(b, A.rows(), node["b"], "omega.b"));
    }
  } catch (const PreconditionError& e) {
    throw InputError(std::string("omega: ") + e.what(), line_of(node));
  }
  throw InputError("omega.kind must be one of whole, box, polyhedron", line_of(node["kind"]));
}

struct TolEntry {
  const char* name;
  double Tolerances::*field;
};
constexpr TolEntry kTolEntries[] = {
    {"feasibility", &Tolerances::feasibility},       {"activity", &Tolerances::activity},
    {"complementarity", &Tolerances::complementarity}, {"certificate", &Tolerances::certificate},
    {"strict_margin", &Tolerances::strict_margin},   {"strict_convexity", &Tolerances::strict_convexity},
};

void apply_tolerances(const YAML::Node& node, const EnvLookup& env, ProblemFile& pf) {
  std::vector<std::pair<std::string, std::string>> src;
  auto env_value = [&](const std::string& name) -> const char* {
    std::string var = "SIVO_TOL_" + name;
    std::transform(var.begin(), var.end(), var.begin(), [](unsigned char c) { return std::toupper(c); });
    return env ? env(var.c_str()) : std::getenv(var.c_str());
  };
  auto read_env = [&](const std::string& name) -> std::optional<double> {
    const char* v = env_value(name);
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const double d = std::strtod(v, &end);
    if (*end != '\0' || !(d > 0.0) || !std::isfinite(d))
      throw InputError("environment override for tolerance '" + name + "' must be a positive number, got '" + v + "'");
    return d;
  };

  if (node) {
    std::set<std::string> allowed;
    for (const auto& e : kTolEntries) allowed.insert(e.name);
    allowed.insert("max_iter");
    if (!node.IsMap()) throw InputError("tolerances must be a mapping", line_of(node));
    for (const auto& kv : node)
      if (!allowed.count(kv.first.as<std::string>()))
        throw InputError("unknown tolerance '" + kv.first.as<std::string>() + "'", line_of(kv.first));
  }
  for (const auto& e : kTolEntries) {
    std::string from = "default";
    if (auto v = read_env(e.name)) {
      pf.tol.*e.field = *v;
      from = "env";
    }
    if (node && node[e.name]) {
      const double v = as_double(node[e.name], std::string("tolerances.") + e.name);
      if (!(v > 0.0)) throw InputError(std::string("tolerance '") + e.name + "' must be positive", line_of(node[e.name]));
      pf.tol.*e.field = v;
      from = "file";
    }
    src.emplace_back(e.name, from);
  }
  std::string from = "default";
  if (auto v = read_env("max_iter")) {
    if (*v != std::floor(*v)) throw InputError("environment override for max_iter must be an integer");
    pf.tol.max_iter = static_cast<int>(*v);
    from = "env";
  }
  if (node && node["max_iter"]) {
    pf.tol.max_iter = as_int(node["max_iter"], "tolerances.max_iter");
    if (pf.tol.max_iter <= 0) throw InputError("max_iter must be positive", line_of(node["max_iter"]));
    from = "file";
  }
  src.emplace_back("max_iter", from);
  pf.tol_sources.entries = std::move(src);
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text, const std::string& source, const EnvLookup& env) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw InputError("YAML syntax error: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  check_keys(root, {"schema", "name", "description", "space", "objectives", "constraints", "omega", "xi", "point",
                    "start", "ybar", "delta", "multipliers", "cone", "sdp", "oracle", "tolerances"},
             "document");

  ProblemFile pf;
  pf.source = source;
  pf.sha256 = sha256_hex(text);
  if (as_int(require(root, "schema", "document"), "schema") != 1)
    throw InputError("unsupported schema version (expected 1)", line_of(root["schema"]));
  if (root["name"]) pf.name = as_string(root["name"], "name");

  const YAML::Node space = require(root, "space", "document");
  check_keys(space, {"n"}, "space");
  pf.n = as_int(require(space, "n", "space"), "space.n");
  if (pf.n < 1) throw InputError("space.n must be positive", line_of(space["n"]));
  const int n = pf.n;

  const YAML::Node objs = require(root, "objectives", "document");
  if (!objs.IsSequence() || objs.size() == 0) throw InputError("objectives must be a nonempty list", line_of(objs));
  std::vector<Expr> objectives;
  for (std::size_t i = 0; i < objs.size(); ++i) objectives.push_back(parse_expr(objs[i], n, 0, "objective"));
  const int m = static_cast<int>(objectives.size());

  std::vector<ConstraintFamily> families;
  if (const YAML::Node cs = root["constraints"]) {
    if (!cs.IsSequence()) throw InputError("constraints must be a list", line_of(cs));
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "constraints[" + std::to_string(i) + "]";
      check_keys(cs[i], {"label", "expr", "index"}, where);
      IndexDomain dom = parse_index(cs[i]["index"], where + ".index");
      Expr g = parse_expr(require(cs[i], "expr", where), n, dom.dim(), where + ".expr");
      const std::string label = cs[i]["label"] ? as_string(cs[i]["label"], where + ".label") : "g" + std::to_string(i + 1);
      families.push_back({label, std::move(g), std::move(dom)});
    }
  }

  const OmegaSet omega = parse_omega(root["omega"], n);

  if (const YAML::Node c = root["cone"]) {
    check_keys(c, {"g", "generators"}, "cone");
    const YAML::Node gs = require(c, "g", "cone");
    if (!gs.IsSequence() || gs.size() == 0) throw InputError("cone.g must be a nonempty list", line_of(gs));
    std::vector<Expr> g;
    for (std::size_t i = 0; i < gs.size(); ++i) g.push_back(parse_expr(gs[i], n, 0, "cone.g"));
    const int q = static_cast<int>(g.size());
    std::vector<Vector> gens;
    for (const auto& v : as_vector_list(require(c, "generators", "cone"), "cone.generators"))
      gens.push_back(sized(v, q, c["generators"], "cone generator"));
    try {
      pf.cone.emplace(q, std::move(gens));
      const Problem scal = scalarize_cone_problem(ConeConstrainedProblem{n, objectives, g, *pf.cone, omega});
      for (auto fam : scal.constraints()) {
        fam.label = "cone";
        families.push_back(std::move(fam));
      }
    } catch (const PreconditionError& e) {
      throw InputError(std::string("cone: ") + e.what(), line_of(c));
    }
  }

  if (const YAML::Node s = root["sdp"]) {
    check_keys(s, {"p", "F"}, "sdp");
    if (!families.empty()) throw InputError("an sdp block cannot be combined with constraints or a cone", line_of(s));
    SdpData sd;
    sd.p = as_int(require(s, "p", "sdp"), "sdp.p");
    if (sd.p < 1) throw InputError("sdp.p must be positive", line_of(s["p"]));
    const YAML::Node F = require(s, "F", "sdp");
    if (!F.IsSequence() || F.size() != static_cast<std::size_t>(n) + 1)
      throw InputError("sdp.F must list F0..F" + std::to_string(n), line_of(F));
    for (std::size_t i = 0; i < F.size(); ++i) sd.F.push_back(as_square(F[i], sd.p, "sdp.F[" + std::to_string(i) + "]"));
    try {
      sd.validate();
    } catch (const PreconditionError& e) {
      throw InputError(std::string("sdp: ") + e.what(), line_of(s));
    }
    pf.sdp = std::move(sd);
  }

  try {
    pf.problem.emplace(n, std::move(objectives), std::move(families), omega);
  } catch (const PreconditionError& e) {
    throw InputError(e.what());
  }

  if (root["xi"]) {
    pf.xi = sized(as_vector(root["xi"], "xi"), m, root["xi"], "xi");
    if (!(pf.xi->minCoeff() >= 0.0)) throw InputError("xi must be nonnegative", line_of(root["xi"]));
  }
  if (root["point"]) pf.point = sized(as_vector(root["point"], "point"), n, root["point"], "point");
  if (root["start"]) pf.start = sized(as_vector(root["start"], "start"), n, root["start"], "start");
  if (root["ybar"]) pf.ybar = sized(as_vector(root["ybar"], "ybar"), m, root["ybar"], "ybar");
  if (root["delta"]) {
    pf.delta = as_double(root["delta"], "delta");
    if (!(*pf.delta > 0.0)) throw InputError("delta must be positive", line_of(root["delta"]));
  }

  if (const YAML::Node mult = root["multipliers"]) {
    check_keys(mult, {"lambda", "mu", "Lambda"}, "multipliers");
    if (mult["lambda"]) pf.lambda = sized(as_vector(mult["lambda"], "multipliers.lambda"), m, mult["lambda"], "multipliers.lambda");
    if (const YAML::Node mu = mult["mu"]) {
      if (!mu.IsSequence()) throw InputError("multipliers.mu must be a list", line_of(mu));
      MultiplierMu mm;
      const auto& fams = pf.problem->constraints();
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const std::string where = "multipliers.mu[" + std::to_string(i) + "]";
        check_keys(mu[i], {"family", "t", "weight"}, where);
        std::size_t fam = 0;
        if (const YAML::Node f = mu[i]["family"]) {
          const std::string key = as_string(f, where + ".family");
          auto it = std::find_if(fams.begin(), fams.end(), [&](const ConstraintFamily& c) { return c.label == key; });
          if (it != fams.end()) {
            fam = static_cast<std::size_t>(it - fams.begin());
          } else {
            const int idx = as_int(f, where + ".family");
            if (idx < 0 || static_cast<std::size_t>(idx) >= fams.size())
              throw InputError(where + ".family does not name a constraint family", line_of(f));
            fam = static_cast<std::size_t>(idx);
          }
        }
        if (fam >= fams.size()) throw InputError(where + " refers to a missing constraint family", line_of(mu[i]));
        const Vector t = mu[i]["t"] ? as_vector(mu[i]["t"], where + ".t") : Vector();
        const auto pos = find_grid_point(fams[fam].domain, t);
        if (!pos) throw InputError(where + ".t is not a point of the index grid", line_of(mu[i]));
        const double w = as_double(require(mu[i], "weight", where), where + ".weight");
        if (!(w >= 0.0)) throw InputError(where + ".weight must be nonnegative", line_of(mu[i]["weight"]));
        mm.entries.push_back({IndexRef{fam, *pos}, w});
      }
      pf.mu = std::move(mm);
    }
    if (mult["Lambda"]) {
      if (!pf.sdp) throw InputError("multipliers.Lambda needs an sdp block", line_of(mult["Lambda"]));
      pf.Lambda = as_square(mult["Lambda"], pf.sdp->p, "multipliers.Lambda");
    }
  }

  if (const YAML::Node o = root["oracle"]) {
    check_keys(o, {"lower", "upper", "points", "extra"}, "oracle");
    GridSpec g;
    g.lo = sized(as_vector(require(o, "lower", "oracle"), "oracle.lower"), n, o["lower"], "oracle.lower");
    g.hi = sized(as_vector(require(o, "upper", "oracle"), "oracle.upper"), n, o["upper"], "oracle.upper");
    const YAML::Node pts = require(o, "points", "oracle");
    if (pts.IsSequence()) {
      for (std::size_t i = 0; i < pts.size(); ++i) g.points_per_dim.push_back(as_int(pts[i], "oracle.points"));
    } else {
      g.points_per_dim.assign(static_cast<std::size_t>(n), as_int(pts, "oracle.points"));
    }
    if (static_cast<int>(g.points_per_dim.size()) != n) throw InputError("oracle.points needs one entry per dimension", line_of(pts));
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(g.lo[i] <= g.hi[i]) || !std::isfinite(g.lo[i]) || !std::isfinite(g.hi[i]) ||
          g.points_per_dim[static_cast<std::size_t>(i)] < 1)
        throw InputError("oracle box is malformed", line_of(o));
    if (o["extra"])
      for (const auto& v : as_vector_list(o["extra"], "oracle.extra")) g.extra_points.push_back(sized(v, n, o["extra"], "oracle.extra point"));
    pf.oracle = std::move(g);
  }

  apply_tolerances(root["tolerances"], env, pf);
  return pf;
}

ProblemFile load_problem_file(const std::string& path, const EnvLookup& env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str(), path, env);
}

ProblemFile load_builtin(const std::string& name, const EnvLookup& env) {
  const auto text = builtin_text(name);
  if (!text) {
    std::string list;
    for (const auto& b : builtin_names()) list += (list.empty() ? "" : ", ") + b;
    throw InputError("unknown built-in problem '" + name + "' (available: " + list + ")");
  }
  return parse_problem_text(*text, "builtin:" + name, env);
}

}  // namespace sivo::cli
