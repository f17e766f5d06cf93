#include "commands.hpp"

#include <sivo/errors.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sivo::cli {

int exit_code_of(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return kHolds;
    case Verdict::Refuted:
      return kViolated;
    case Verdict::Inconclusive:
      return kInconclusive;
  }
  return kInconclusive;
}

Vector parse_vector_arg(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(parse_number(item));
    } catch (const Error&) {
      throw InputError("cannot read '" + item + "' as a number in '" + text + "'");
    }
  }
  if (vals.empty()) throw InputError("empty vector argument");
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

namespace {

std::string fmt(double d) {
  std::ostringstream s;
  s << std::setprecision(10) << (d == 0.0 ? 0.0 : d);
  return s.str();
}

std::string fmt(const Vector& v) {
  std::ostringstream s;
  s << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) s << (i ? ", " : "") << fmt(v[i]);
  s << ')';
  return s.str();
}

const Problem& problem_of(const ProblemFile& pf) {
  if (!pf.problem) throw InputError("problem file has no problem section");
  return *pf.problem;
}

void reject_sdp(const ProblemFile& pf, const char* command) {
  if (pf.sdp) throw InputError(std::string("this file has an sdp block; '") + command + "' does not handle it, use 'sdp'");
}

const GridSpec& oracle_of(const ProblemFile& pf) {
  if (!pf.oracle) throw InputError("this command needs an oracle section (grid box and resolution)");
  return *pf.oracle;
}

void describe_certificate(std::ostream& o, const Problem& P, const Certificate& c) {
  o << "  verdict:     " << to_string(c.verdict) << '\n';
  o << "  residual:    " << fmt(c.residual) << "  (lower bound " << fmt(c.lower_bound) << ")\n";
  o << "  lambda:      " << fmt(c.lambda) << '\n';
  if (c.mu.empty()) {
    o << "  mu:          0\n";
  } else {
    o << "  mu:         ";
    for (const auto& e : c.mu.entries) o << ' ' << P.label(e.index) << ':' << fmt(e.weight);
    o << '\n';
  }
  for (std::size_t i = 0; i < c.objective_subgradients.size(); ++i)
    o << "  z" << i + 1 << ":          " << fmt(c.objective_subgradients[i].value) << '\n';
  o << "  ball:        " << fmt(c.ball) << "  (|b| <= " << fmt(c.ball_bound) << ")\n";
  if (!c.normal_generators.empty()) o << "  normal:      " << fmt(c.normal) << '\n';
  if (!c.note.empty()) o << "  note:        " << c.note << '\n';
}

}  // namespace

CommandResult cmd_check(const ProblemFile& pf, const Vector& point, const Vector& xi, bool search) {
  reject_sdp(pf, "check");
  const Problem& P = problem_of(pf);
  KktOptions o;
  o.tol = pf.tol;
  if (!search) {
    o.lambda = pf.lambda;
    o.mu = pf.mu;
  }
  const bool verify = o.lambda || o.mu;
  const Certificate c = check_kkt(P, point, xi, o);

  CommandResult r;
  r.exit_code = exit_code_of(c.verdict);
  r.verdict = to_string(c.verdict);
  r.result = Json{{"mode", verify ? "verify" : "search"}, {"certificate", certificate_json(P, c)}};
  std::ostringstream t;
  t << "KKT inclusion at " << fmt(point) << " with xi " << fmt(xi) << " (" << (verify ? "verify" : "search") << ")\n";
  describe_certificate(t, P, c);
  r.text = t.str();
  return r;
}

CommandResult cmd_fuzzy(const ProblemFile& pf, const Vector& point, const Vector& xi, double delta) {
  reject_sdp(pf, "fuzzy");
  const Problem& P = problem_of(pf);
  FuzzyOptions o;
  o.tol = pf.tol;
  const FuzzyCertificate fc = fuzzy_kkt(P, point, xi, delta, o);

  CommandResult r;
  r.exit_code = exit_code_of(fc.verdict);
  r.verdict = to_string(fc.verdict);
  r.result = fuzzy_json(P, fc);
  std::ostringstream t;
  t << "Perturbed KKT conditions near " << fmt(point) << ", delta " << fmt(delta) << '\n';
  t << "  x_delta:     " << fmt(fc.x_delta) << "  psi " << fmt(fc.psi) << '\n';
  describe_certificate(t, P, fc.inclusion);
  if (!fc.note.empty()) t << "  " << fc.note << '\n';
  r.text = t.str();
  return r;
}

CommandResult cmd_cq(const ProblemFile& pf, const Vector& point, std::optional<int> ai) {
  reject_sdp(pf, "cq");
  const Problem& P = problem_of(pf);
  if (ai && (*ai < 1 || *ai > P.m()))
    throw InputError("--ai must lie between 1 and " + std::to_string(P.m()));
  const std::string condition = ai ? "A" + std::to_string(*ai) : "U";
  const CqResult cq = ai ? check_cq_Ai(P, point, *ai - 1, pf.tol) : check_cq_U(P, point, pf.tol);

  CommandResult r;
  r.exit_code = cq.holds ? kHolds : kViolated;
  r.verdict = cq.holds ? "holds" : "fails";
  r.result = cq_json(cq, condition);
  std::ostringstream t;
  t << "Condition (" << condition << ") at " << fmt(point) << ": " << r.verdict << '\n';
  if (cq.vacuous) t << "  no active sets\n";
  if (cq.direction.size()) t << "  direction:   " << fmt(cq.direction) << "  margin " << fmt(cq.margin) << '\n';
  if (!cq.note.empty()) t << "  note:        " << cq.note << '\n';
  r.text = t.str();
  return r;
}

CommandResult cmd_classify(const ProblemFile& pf, const Vector& point, const Vector& xi, Notion notion, double slack,
                           const std::optional<Vector>& ybar) {
  reject_sdp(pf, "classify");
  const Problem& P = problem_of(pf);
  const GridSpec& spec = oracle_of(pf);
  const FeasibleGrid grid = FeasibleGrid::build(P, spec, pf.tol.feasibility);
  if (grid.empty()) throw InputError("the oracle grid has no feasible points");
  const ClassificationReport rep = classify_point(P, point, xi, grid, slack);
  const Vector y = ybar ? *ybar : P.objective_values(point);
  const SectionResult sec = bounded_section(P, y, spec, pf.tol.feasibility);

  const NotionVerdict& chosen = rep.get(notion);
  CommandResult r;
  r.exit_code = chosen.holds ? kHolds : kViolated;
  r.verdict = chosen.holds ? "holds" : "violated";
  r.result = Json{{"notion", to_string(notion)},
                  {"classification", classification_json(P, rep)},
                  {"section", section_json(sec)},
                  {"ybar", to_json(y)}};
  std::ostringstream t;
  t << "Classification of " << fmt(point) << " with xi " << fmt(xi) << " on " << grid.size() << " grid points\n";
  for (const auto& v : rep.notions) {
    t << "  " << std::left << std::setw(22) << to_string(v.notion) << (v.holds ? "holds" : "violated");
    if (!v.holds) t << "  by x = " << fmt(v.witness) << ", f(x) + shift - f(xbar) = " << fmt(v.shifted_difference);
    t << '\n';
  }
  t << "  section at " << fmt(y) << ": " << (sec.empty ? "empty" : sec.bounded ? "bounded" : "unbounded");
  if (sec.bounded && !sec.empty) t << ", bound " << fmt(sec.bound);
  t << '\n';
  r.text = t.str();
  return r;
}

CommandResult cmd_exists(const ProblemFile& pf, const Vector& xi, bool quasi, const std::optional<Vector>& start,
                         const std::optional<std::string>& front_csv) {
  reject_sdp(pf, "exists");
  const Problem& P = problem_of(pf);
  const GridSpec& spec = oracle_of(pf);
  const FeasibleGrid grid = FeasibleGrid::build(P, spec, pf.tol.feasibility);

  CommandResult r;
  std::ostringstream t;
  if (grid.empty()) {
    r.exit_code = kInconclusive;
    r.verdict = "inconclusive";
    r.result = Json{{"grid_size", 0}, {"note", "the oracle grid has no feasible points"}};
    r.text = "No feasible grid points.\n";
    return r;
  }

  if (front_csv) {
    std::ofstream csv(*front_csv);
    if (!csv) throw InputError("cannot write '" + *front_csv + "'");
    csv << std::setprecision(17);
    for (int i = 0; i < P.n(); ++i) csv << 'x' << i + 1 << ',';
    for (int i = 0; i < P.m(); ++i) csv << 'f' << i + 1 << (i + 1 < P.m() ? "," : "\n");
    for (std::size_t k : shifted_front(xi, grid)) {
      for (Eigen::Index i = 0; i < P.n(); ++i) csv << grid.points()[k][i] << ',';
      for (Eigen::Index i = 0; i < P.m(); ++i) csv << grid.values()(i, static_cast<Eigen::Index>(k)) << (i + 1 < P.m() ? "," : "\n");
    }
  }

  Vector found;
  Notion notion;
  Json detail;
  if (quasi) {
    if (!(xi.minCoeff() > 0.0)) throw InputError("--quasi needs xi > 0 in every component");
    const Vector x0 = start ? *start : pf.start ? *pf.start : grid.points().front();
    const EkelandResult e = ekeland_quasi(P, xi, x0, grid, pf.tol.feasibility);
    found = e.x;
    notion = Notion::XiQuasiPareto;
    detail = ekeland_json(e);
    detail["start"] = to_json(x0);
    detail["within_grid_iterations"] = e.iterations <= grid.size();
    t << "Descent from " << fmt(x0) << " stopped after " << e.iterations << " moves at " << fmt(e.x) << '\n';
  } else {
    const GridPoint g = find_xi_pareto(P, xi, grid);
    found = g.x;
    notion = Notion::XiPareto;
    detail = grid_point_json(g);
    t << "First non-dominated grid point after shifting by " << fmt(xi) << ": " << fmt(g.x) << '\n';
  }
  const ClassificationReport check = classify_point(P, found, xi, grid, 0.0);
  const bool holds = check.get(notion).holds;
  const SectionResult sec = bounded_section(P, P.objective_values(found), spec, pf.tol.feasibility);

  r.exit_code = holds ? kHolds : kViolated;
  r.verdict = holds ? "holds" : "violated";
  r.result = Json{{"method", quasi ? "ekeland-descent" : "grid-front"},
                  {"notion", to_string(notion)},
                  {"grid_size", grid.size()},
                  {"point", detail},
                  {"oracle_check", classification_json(P, check)},
                  {"section", section_json(sec)}};
  t << "  oracle check (" << to_string(notion) << "): " << r.verdict << " on " << grid.size() << " grid points\n";
  if (front_csv) t << "  front written to " << *front_csv << '\n';
  r.text = t.str();
  return r;
}

CommandResult cmd_suffice(const ProblemFile& pf, const Vector& point, const Vector& xi, SufficiencyMode mode) {
  reject_sdp(pf, "suffice");
  const Problem& P = problem_of(pf);
  const FeasibleGrid grid = FeasibleGrid::build(P, oracle_of(pf), pf.tol.feasibility);
  const SufficiencyResult s = sufficiency_verdict(P, point, xi, mode, grid.points(), pf.tol);

  CommandResult r;
  r.exit_code = exit_code_of(s.verdict);
  r.verdict = to_string(s.verdict);
  r.result = Json{{"mode", mode == SufficiencyMode::Quasi ? "quasi" : "quasi-weak"}, {"samples", grid.size()}};
  r.result["sufficiency"] = sufficiency_json(P, s);
  std::ostringstream t;
  t << "Sufficient conditions at " << fmt(point) << " (" << r.result["mode"].get<std::string>() << "): "
    << to_string(s.status) << '\n';
  if (s.summary != to_string(s.status)) t << "  " << s.summary << '\n';
  r.text = t.str();
  return r;
}

CommandResult cmd_convexity(const ProblemFile& pf, const Vector& point, const std::vector<Vector>& samples, bool strict) {
  reject_sdp(pf, "convexity");
  const Problem& P = problem_of(pf);
  GenConvexityOptions o;
  o.strict = strict;
  o.tol = pf.tol;
  const GenConvexityResult g = check_gen_convexity(P, point, samples, o);

  CommandResult r;
  r.exit_code = g.falsified ? kViolated : kHolds;
  r.verdict = g.falsified ? "falsified" : "not-falsified";
  r.result = convexity_json(P, g);
  r.result["strict"] = strict;
  std::ostringstream t;
  t << (strict ? "Strict generalized" : "Generalized") << " convexity at " << fmt(point) << ": " << r.verdict << " ("
    << g.samples_checked << " samples, " << g.programs_solved << " programs)\n";
  if (g.falsified) {
    t << "  x = " << fmt(g.x) << ", z* =";
    for (const auto& z : g.z) t << ' ' << fmt(z);
    t << ", dual value " << fmt(g.dual_value) << '\n';
  }
  if (!g.note.empty()) t << "  note: " << g.note << '\n';
  r.text = t.str();
  return r;
}

CommandResult cmd_sdp(const ProblemFile& pf, const Vector& point, const Vector& xi, bool search) {
  if (!pf.sdp) throw InputError("the sdp command needs an sdp block");
  const Problem& P = problem_of(pf);
  SdpOptions o;
  o.tol = pf.tol;
  if (!search) {
    o.Lambda = pf.Lambda;
    o.lambda = pf.lambda;
  }
  const SdpCertificate s = sdp_check_kkt(P, *pf.sdp, point, xi, o);

  CommandResult r;
  r.exit_code = exit_code_of(s.cert.verdict);
  r.verdict = to_string(s.cert.verdict);
  r.result = sdp_json(P, s);
  std::ostringstream t;
  t << "Matrix-inequality KKT inclusion at " << fmt(point) << '\n';
  describe_certificate(t, P, s.cert);
  t << "  Lambda min eigenvalue " << fmt(s.lambda_min_eig) << ", Lambda . g(x) = " << fmt(s.complementarity)
    << ", active rank " << s.active_rank << (s.exact_search ? "" : " (sampled search)") << '\n';
  r.text = t.str();
  return r;
}

namespace {

Vector require_vec(const std::optional<Vector>& v, const char* what) {
  if (!v) throw InputError(std::string("missing ") + what);
  return *v;
}

}  // namespace

CommandResult cmd_example(const std::string& name, const EnvLookup& env) {
  const ProblemFile pf = load_builtin(name, env);
  const Vector x = require_vec(pf.point, "point");
  const Vector xi = require_vec(pf.xi, "xi");
  Json stages = Json::array();
  std::ostringstream t;
  t << "Built-in problem " << name << "\n\n";
  auto stage = [&](const std::string& label, const CommandResult& c) {
    stages.push_back(Json{{"stage", label}, {"exit_code", c.exit_code}, {"verdict", c.verdict}, {"result", c.result}});
    t << "[" << label << "] exit " << c.exit_code << '\n' << c.text << '\n';
  };

  if (name == "example-3.1") {
    stage("cq U", cmd_cq(pf, x, std::nullopt));
    for (int i = 1; i <= pf.problem->m(); ++i) stage("cq A" + std::to_string(i), cmd_cq(pf, x, i));
    stage("check", cmd_check(pf, x, xi, true));
    stage("classify", cmd_classify(pf, x, xi, Notion::XiQuasiWeakPareto, 0.0, std::nullopt));
    if (!pf.delta) throw InputError("missing delta");
    stage("fuzzy", cmd_fuzzy(pf, x, xi, *pf.delta));
  } else {
    stage("check", cmd_check(pf, x, xi, false));
    const CommandResult cl = cmd_classify(pf, x, xi, Notion::XiQuasiWeakPareto, 0.0, std::nullopt);
    stage("classify", cl);
    // the violating witness first, then the oracle grid
    std::vector<Vector> samples;
    const Json& notions = cl.result["classification"]["notions"];
    for (const auto& v : notions)
      if (v["notion"] == to_string(Notion::XiQuasiWeakPareto) && v.contains("witness"))
        samples.push_back(vector_from_json(v["witness"]["x"]));
    const FeasibleGrid grid = FeasibleGrid::build(*pf.problem, oracle_of(pf), pf.tol.feasibility);
    samples.insert(samples.end(), grid.points().begin(), grid.points().end());
    stage("convexity", cmd_convexity(pf, x, samples, false));
    stage("suffice", cmd_suffice(pf, x, xi, SufficiencyMode::QuasiWeak));
  }

  CommandResult r;
  r.exit_code = kHolds;
  r.verdict = "completed";
  r.result = Json{{"example", name}, {"stages", std::move(stages)}};
  r.text = t.str();
  return r;
}

CommandResult cmd_verify(const Json& report) {
  const VerifyOutcome v = verify_report(report);
  CommandResult r;
  r.exit_code = v.failures.empty() ? kHolds : kViolated;
  r.verdict = v.failures.empty() ? "reproduced" : "mismatch";
  Json fails = Json::array();
  for (const auto& f : v.failures) fails.push_back(f);
  r.result = Json{{"checks", v.checked}, {"failures", std::move(fails)}};
  std::ostringstream t;
  t << "Re-verified " << v.checked << " claims: " << (v.failures.empty() ? "all reproduce" : "mismatches found") << '\n';
  for (const auto& f : v.failures) t << "  " << f << '\n';
  r.text = t.str();
  return r;
}

namespace {

struct Args {
  std::string file;
  std::string builtin;
  std::string point;
  std::string xi;
  std::string json;
  bool search = false;
  double delta = 0.0;
  int ai = 0;
  std::string notion = "xi-quasi-weak-pareto";
  double slack = 0.0;
  std::string ybar;
  bool quasi = false;
  std::string start;
  std::string front_csv;
  std::string mode = "quasi-weak";
  bool strict = false;
  std::string example;
  std::string report;
};

void add_input(CLI::App* sub, Args& a, bool needs_point) {
  sub->add_option("file", a.file, "Problem file (YAML, schema 1)");
  sub->add_option("--builtin", a.builtin, "Use a shipped problem instead of a file");
  if (needs_point) sub->add_option("--point", a.point, "Point to test, comma separated (default: file 'point')");
  sub->add_option("--xi", a.xi, "Tolerance vector, comma separated (default: file 'xi')");
  sub->add_option("--json", a.json, "Write the machine-readable report to this path");
}

Notion notion_from(const std::string& s) {
  for (Notion n : kAllNotions)
    if (to_string(n) == s) return n;
  throw InputError("unknown notion '" + s + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  Args a;
  CLI::App app{"Certificates and oracles for approximate Pareto optimality in nonsmooth multiobjective programs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sivo 0.1.0");

  auto* check = app.add_subcommand("check", "Test the approximate KKT inclusion at a point");
  add_input(check, a, true);
  check->add_flag("--search", a.search, "Search multipliers even if the file supplies them");

  auto* fuzzy = app.add_subcommand("fuzzy", "Perturbed KKT conditions in a delta-ball");
  add_input(fuzzy, a, true);
  fuzzy->add_option("--delta", a.delta, "Ball radius (default: file 'delta')");

  auto* cq = app.add_subcommand("cq", "Constraint qualification (U), or (A_i) with --ai");
  add_input(cq, a, true);
  cq->add_option("--ai", a.ai, "Objective index i (1-based) for condition (A_i)");

  auto* classify = app.add_subcommand("classify", "Grid test of the six solution notions and the section bound");
  add_input(classify, a, true);
  classify->add_option("--notion", a.notion, "Notion that sets the exit code");
  classify->add_option("--slack", a.slack, "Definition slack of the oracle");
  classify->add_option("--ybar", a.ybar, "Section level (default: f(point))");

  auto* exists = app.add_subcommand("exists", "Find an approximate solution on the grid");
  add_input(exists, a, false);
  exists->add_flag("--quasi", a.quasi, "Descent to a xi-quasi solution instead of the shifted front");
  exists->add_option("--start", a.start, "Start point of the descent (default: file 'start')");
  exists->add_option("--front-csv", a.front_csv, "Write the xi-shifted nondominated front as CSV");

  auto* suffice = app.add_subcommand("suffice", "KKT plus generalized convexity");
  add_input(suffice, a, true);
  suffice->add_option("--mode", a.mode, "quasi-weak or quasi")->check(CLI::IsMember({"quasi-weak", "quasi"}));

  auto* convexity = app.add_subcommand("convexity", "Falsification test of generalized convexity on the oracle grid");
  add_input(convexity, a, true);
  convexity->add_flag("--strict", a.strict, "Test the strict variant");

  auto* sdp = app.add_subcommand("sdp", "KKT inclusion for a linear matrix inequality constraint");
  add_input(sdp, a, true);
  sdp->add_flag("--search", a.search, "Search the multiplier even if the file supplies one");

  auto* example = app.add_subcommand("example", "Run the full pipeline on a shipped problem");
  example->add_option("name", a.example, "Built-in problem name")->required();
  example->add_option("--json", a.json, "Write the machine-readable report to this path");

  auto* verify = app.add_subcommand("verify", "Recompute every witness in a JSON report");
  verify->add_option("report", a.report, "JSON report")->required();
  verify->add_option("--json", a.json, "Write the machine-readable report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const auto t0 = std::chrono::steady_clock::now();

  Json options = Json::object();
  Json input = Json::object();
  Json tolerances;
  Json tolerance_sources = Json::object();
  const auto echo_tolerances = [&](const ProblemFile& pf) {
    tolerances = to_json(pf.tol);
    for (const auto& [name, from] : pf.tol_sources.entries) tolerance_sources[name] = from;
  };
  Json point_json, xi_json;
  CommandResult r;
  try {
    if (command == "example") {
      options["name"] = a.example;
      const ProblemFile pf = load_builtin(a.example, env);
      input = Json{{"source", pf.source}, {"sha256", pf.sha256}};
      echo_tolerances(pf);
      point_json = to_json(require_vec(pf.point, "point"));
      xi_json = to_json(require_vec(pf.xi, "xi"));
      r = cmd_example(a.example, env);
    } else if (command == "verify") {
      std::ifstream in(a.report, std::ios::binary);
      if (!in) throw InputError("cannot open report '" + a.report + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      Json rep;
      try {
        rep = Json::parse(ss.str());
      } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("report is not valid JSON: ") + e.what());
      }
      options["report"] = a.report;
      input = Json{{"source", a.report}, {"sha256", sha256_hex(ss.str())}};
      r = cmd_verify(rep);
    } else {
      if (a.file.empty() == a.builtin.empty()) throw InputError("give exactly one of FILE or --builtin NAME");
      const ProblemFile pf = a.builtin.empty() ? load_problem_file(a.file, env) : load_builtin(a.builtin, env);
      input = Json{{"source", pf.source}, {"sha256", pf.sha256}};
      echo_tolerances(pf);
      if (!a.file.empty()) options["file"] = a.file;
      if (!a.builtin.empty()) options["builtin"] = a.builtin;

      const auto vec_opt = [](const std::string& s, const std::optional<Vector>& fallback) -> std::optional<Vector> {
        return s.empty() ? fallback : std::optional<Vector>(parse_vector_arg(s));
      };
      const std::optional<Vector> xi = vec_opt(a.xi, pf.xi);
      const Vector xiv = require_vec(xi, "xi (give --xi or set it in the file)");
      xi_json = to_json(xiv);
      options["xi"] = xi_json;

      std::optional<Vector> point;
      if (command != "exists") {
        point = vec_opt(a.point, pf.point);
        point_json = to_json(require_vec(point, "point (give --point or set it in the file)"));
        options["point"] = point_json;
        if (point->size() != pf.n) throw InputError("point has the wrong dimension");
      }
      if (xiv.size() != problem_of(pf).m()) throw InputError("xi has the wrong number of entries");

      if (command == "check") {
        options["search"] = a.search;
        r = cmd_check(pf, *point, xiv, a.search);
      } else if (command == "fuzzy") {
        const double delta = a.delta > 0.0 ? a.delta : pf.delta.value_or(0.0);
        if (!(delta > 0.0)) throw InputError("missing or nonpositive delta (give --delta or set it in the file)");
        options["delta"] = delta;
        r = cmd_fuzzy(pf, *point, xiv, delta);
      } else if (command == "cq") {
        std::optional<int> ai;
        if (a.ai != 0) ai = a.ai;
        options["ai"] = ai ? Json(*ai) : Json(nullptr);
        r = cmd_cq(pf, *point, ai);
      } else if (command == "classify") {
        const Notion n = notion_from(a.notion);
        std::optional<Vector> ybar = vec_opt(a.ybar, pf.ybar);
        if (ybar && ybar->size() != problem_of(pf).m()) throw InputError("ybar has the wrong number of entries");
        options["notion"] = a.notion;
        options["slack"] = a.slack;
        if (ybar) options["ybar"] = to_json(*ybar);
        r = cmd_classify(pf, *point, xiv, n, a.slack, ybar);
      } else if (command == "exists") {
        std::optional<Vector> start = vec_opt(a.start, std::nullopt);
        if (start && start->size() != pf.n) throw InputError("start has the wrong dimension");
        options["quasi"] = a.quasi;
        if (start) options["start"] = to_json(*start);
        if (!a.front_csv.empty()) options["front_csv"] = a.front_csv;
        r = cmd_exists(pf, xiv, a.quasi, start,
                       a.front_csv.empty() ? std::nullopt : std::optional<std::string>(a.front_csv));
      } else if (command == "suffice") {
        options["mode"] = a.mode;
        r = cmd_suffice(pf, *point, xiv, a.mode == "quasi" ? SufficiencyMode::Quasi : SufficiencyMode::QuasiWeak);
      } else if (command == "convexity") {
        options["strict"] = a.strict;
        const FeasibleGrid grid = FeasibleGrid::build(problem_of(pf), oracle_of(pf), pf.tol.feasibility);
        r = cmd_convexity(pf, *point, grid.points(), a.strict);
      } else if (command == "sdp") {
        options["search"] = a.search;
        r = cmd_sdp(pf, *point, xiv, a.search);
      }
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << r.text;
  out << "exit code " << r.exit_code << " (" << r.verdict << "), " << std::fixed << std::setprecision(3) << elapsed
      << " s\n";
  out.unsetf(std::ios::floatfield);

  if (!a.json.empty()) {
    Json report{{"schema", 1},
                {"command", Json{{"name", command}, {"options", options}}},
                {"input", input},
                {"tolerances", tolerances},
                {"tolerance_sources", tolerance_sources},
                {"point", point_json},
                {"xi", xi_json},
                {"result", r.result},
                {"verdict", r.verdict},
                {"exit_code", r.exit_code}};
    std::ofstream f(a.json, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << a.json << "'\n";
      return kInputError;
    }
    f << report.dump(2) << '\n';
  }
  return r.exit_code;
}

}  // namespace sivo::cli
