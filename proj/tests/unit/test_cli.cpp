#include "commands.hpp"

#include <sivo/errors.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace sivo;
using namespace sivo::cli;

namespace {

namespace fs = std::filesystem;

const std::string kProblems = SIVO_PROBLEMS_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args, const EnvLookup& env = {}) {
  args.insert(args.begin(), "sivo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err, env);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("sivo-test-" + std::to_string(std::rand()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

const char* kMinimal = R"(schema: 1
space: {n: 1}
objectives: ["x^2", "(x - 1)^2"]
constraints:
  - {label: g, expr: "x - 1 - t", index: {kind: interval, a: 0, b: 1, resolution: 11}}
omega: {kind: box, lower: [-1], upper: [2]}
xi: [0.1, 0.1]
point: [0.5]
oracle: {lower: [-1], upper: [2], points: 301}
)";

}  // namespace

TEST(ProblemFile, ParsesMinimalDocument) {
  const ProblemFile pf = parse_problem_text(kMinimal, "mem");
  ASSERT_TRUE(pf.problem.has_value());
  EXPECT_EQ(pf.problem->m(), 2);
  EXPECT_EQ(pf.problem->constraints().front().domain.grid().size(), 11u);
  EXPECT_EQ((*pf.point)[0], 0.5);
  EXPECT_EQ(pf.sha256, sha256_hex(kMinimal));
  EXPECT_EQ(pf.sha256.size(), 64u);
}

TEST(ProblemFile, UnknownKeyReportsLine) {
  const std::string text = std::string(kMinimal) + "colour: blue\n";
  try {
    parse_problem_text(text, "mem");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 10);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(ProblemFile, SchemaErrors) {
  EXPECT_THROW(parse_problem_text("schema: 2\nspace: {n: 1}\nobjectives: [x]\n", "mem"), InputError);
  EXPECT_THROW(parse_problem_text("space: {n: 1}\nobjectives: [x]\n", "mem"), InputError);
  EXPECT_THROW(parse_problem_text("schema: 1\nspace: {n: 1}\nobjectives: [\"x +\"]\n", "mem"), InputError);
  EXPECT_THROW(parse_problem_text("schema: 1\nspace: {n: 1}\nobjectives: [x]\nxi: [-1]\n", "mem"), InputError);
  EXPECT_THROW(parse_problem_text("schema: 1\nspace: {n: 2}\nobjectives: [x1]\npoint: [1]\n", "mem"), InputError);
  EXPECT_THROW(parse_problem_text("schema: 1\nspace: {n: 1\n", "mem"), InputError);
}

TEST(ProblemFile, ToleranceLayers) {
  const std::string text = std::string(kMinimal) + "tolerances: {certificate: 1.0e-6}\n";
  const EnvLookup env = [](const char* name) -> const char* {
    const std::string n = name;
    if (n == "SIVO_TOL_CERTIFICATE") return "1e-4";
    if (n == "SIVO_TOL_ACTIVITY") return "1e-6";
    return nullptr;
  };
  const ProblemFile pf = parse_problem_text(text, "mem", env);
  EXPECT_EQ(pf.tol.certificate, 1e-6);
  EXPECT_EQ(pf.tol.activity, 1e-6);
  EXPECT_EQ(pf.tol.feasibility, Tolerances{}.feasibility);

  const EnvLookup bad = [](const char* name) -> const char* {
    return std::string(name) == "SIVO_TOL_FEASIBILITY" ? "-3" : nullptr;
  };
  EXPECT_THROW(parse_problem_text(kMinimal, "mem", bad), InputError);
}

TEST(ProblemFile, NumbersMayBeConstantExpressions) {
  EXPECT_NEAR(parse_number("-1/pi"), -0.3183098861837907, 1e-15);
  EXPECT_THROW(parse_number("x + 1"), sivo::Error);
  EXPECT_THROW(parse_vector_arg("1,x"), InputError);
  const Vector v = parse_vector_arg("1, 2.5,-1/pi");
  ASSERT_EQ(v.size(), 3);
  EXPECT_EQ(v[1], 2.5);
}

TEST(ProblemFile, BuiltinsAreAvailable) {
  const auto names = builtin_names();
  EXPECT_EQ(names, (std::vector<std::string>{"example-3.1", "example-3.2"}));
  for (const auto& n : names) EXPECT_NO_THROW(load_builtin(n));
  EXPECT_THROW(load_builtin("nope"), InputError);
}

TEST(ExitCodes, Check) {
  TempDir dir;
  const std::string f = dir.write("p.yaml", kMinimal);
  EXPECT_EQ(run({"check", f}).code, kHolds);
  EXPECT_EQ(run({"check", f, "--point", "-0.5"}).code, kViolated);
  EXPECT_EQ(run({"check", f, "--point", "3"}).code, kInputError);
  EXPECT_EQ(run({"check", "--builtin", "example-3.2"}).code, kHolds);
}

TEST(ExitCodes, Fuzzy) {
  TempDir dir;
  const std::string f = dir.write("p.yaml", kMinimal);
  EXPECT_EQ(run({"fuzzy", f, "--delta", "0.2"}).code, kHolds);
  EXPECT_EQ(run({"fuzzy", f}).code, kInputError);
  EXPECT_EQ(run({"fuzzy", f, "--delta", "-1"}).code, kInputError);
}

TEST(ExitCodes, Cq) {
  EXPECT_EQ(run({"cq", "--builtin", "example-3.1"}).code, kHolds);
  EXPECT_EQ(run({"cq", "--builtin", "example-3.1", "--ai", "1"}).code, kViolated);
  EXPECT_EQ(run({"cq", "--builtin", "example-3.1", "--ai", "3"}).code, kInputError);
}

TEST(ExitCodes, Classify) {
  EXPECT_EQ(run({"classify", "--builtin", "example-3.1"}).code, kHolds);
  EXPECT_EQ(run({"classify", "--builtin", "example-3.2"}).code, kViolated);
  EXPECT_EQ(run({"classify", "--builtin", "example-3.2", "--notion", "weak-pareto"}).code, kViolated);
  EXPECT_EQ(run({"classify", "--builtin", "example-3.2", "--notion", "bogus"}).code, kInputError);
}

TEST(ExitCodes, Exists) {
  TempDir dir;
  const std::string f = dir.write("p.yaml", kMinimal);
  EXPECT_EQ(run({"exists", f}).code, kHolds);
  EXPECT_EQ(run({"exists", f, "--quasi", "--start", "1"}).code, kHolds);
  EXPECT_EQ(run({"exists", f, "--quasi", "--start", "2"}).code, kInputError);
  const CliRun csv = run({"exists", f, "--front-csv", dir.file("front.csv")});
  EXPECT_EQ(csv.code, kHolds);
  std::ifstream in(dir.file("front.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x1,f1,f2");
  const std::string empty_grid = std::string(kMinimal) + "start: [5]\n";
  EXPECT_EQ(run({"exists", dir.write("q.yaml", empty_grid), "--quasi"}).code, kInputError);
}

TEST(ExitCodes, Suffice) {
  TempDir dir;
  const std::string f = dir.write("p.yaml", kMinimal);
  EXPECT_EQ(run({"suffice", f}).code, kHolds);
  EXPECT_EQ(run({"suffice", "--builtin", "example-3.2"}).code, kViolated);
  EXPECT_EQ(run({"suffice", f, "--mode", "sometimes"}).code, kInputError);
}

TEST(ExitCodes, Sdp) {
  EXPECT_EQ(run({"sdp", kProblems + "/lmi-certified.yaml"}).code, kHolds);
  EXPECT_EQ(run({"sdp", kProblems + "/lmi-refuted.yaml"}).code, kViolated);
  EXPECT_EQ(run({"sdp", "--builtin", "example-3.1"}).code, kInputError);
  EXPECT_EQ(run({"check", kProblems + "/lmi-refuted.yaml"}).code, kInputError);
}

TEST(ExitCodes, ExampleAndMisc) {
  EXPECT_EQ(run({"example", "example-3.1"}).code, kHolds);
  EXPECT_EQ(run({"example", "example-3.2"}).code, kHolds);
  EXPECT_EQ(run({"example", "example-9"}).code, kInputError);
  EXPECT_EQ(run({}).code, kInputError);
  EXPECT_EQ(run({"frobnicate"}).code, kInputError);
  EXPECT_EQ(run({"check", "/nonexistent/file.yaml"}).code, kInputError);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(ExitCodes, MalformedFileReportsLine) {
  TempDir dir;
  const CliRun r = run({"check", dir.write("bad.yaml", "schema: 1\nspace: {n: 1}\nobjectives: [x]\npoynt: [0]\n")});
  EXPECT_EQ(r.code, kInputError);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
}

TEST(Report, EnvelopeAndVerification) {
  TempDir dir;
  const std::string f = dir.write("p.yaml", kMinimal);
  const std::string out = dir.file("r.json");
  ASSERT_EQ(run({"check", f, "--json", out}).code, kHolds);
  const Json j = read_json(out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["command"]["name"], "check");
  EXPECT_FALSE(j["command"]["options"].contains("json"));
  EXPECT_EQ(j["input"]["sha256"], sha256_hex(kMinimal));
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_TRUE(j.contains("tolerances"));
  EXPECT_EQ(j["tolerance_sources"]["certificate"], "default");
  const VerifyOutcome v = verify_report(j);
  EXPECT_GT(v.checked, 0u);
  EXPECT_TRUE(v.failures.empty());

  ASSERT_EQ(run({"verify", out}).code, kHolds);
}

TEST(Report, TamperedCertificateFailsVerification) {
  TempDir dir;
  const std::string out = dir.file("r.json");
  ASSERT_EQ(run({"example", "example-3.2", "--json", out}).code, kHolds);
  Json j = read_json(out);
  EXPECT_TRUE(verify_report(j).failures.empty());
  auto& cert = j["result"]["stages"][0]["result"]["certificate"];
  ASSERT_EQ(cert["kind"], "kkt-certificate");
  cert["residual"] = 0.5;
  EXPECT_FALSE(verify_report(j).failures.empty());
  std::ofstream(dir.file("t.json")) << j.dump(2);
  EXPECT_EQ(run({"verify", dir.file("t.json")}).code, kViolated);
}

TEST(Report, ByteIdenticalAcrossRuns) {
  TempDir dir;
  const std::string f = dir.write("p.yaml", kMinimal);
  const std::vector<std::vector<std::string>> cmds{{"check", f}, {"classify", f}, {"exists", f, "--quasi"}};
  for (const auto& c : cmds) {
    std::string first;
    for (int k = 0; k < 2; ++k) {
      auto args = c;
      args.insert(args.end(), {"--json", dir.file("d.json")});
      run(args);
      std::ifstream in(dir.file("d.json"));
      const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (k == 0) first = bytes;
      else EXPECT_EQ(first, bytes) << c.front();
    }
  }
}
