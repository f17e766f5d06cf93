#pragma once

#include <sivo/conic.hpp>
#include <sivo/oracle.hpp>
#include <sivo/problem.hpp>
#include <sivo/tolerances.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sivo::cli {

/// Malformed or inconsistent problem file. `line` is 1-based, 0 when unknown.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Where each tolerance value came from.
struct ToleranceSources {
  std::vector<std::pair<std::string, std::string>> entries;  // name -> default | env | file
};

struct ProblemFile {
  std::string source;  // path or builtin:<name>
  std::string sha256;  // of the document text
  std::string name;

  int n = 1;
  std::optional<Problem> problem;  // for sdp files: objectives and Omega only

  std::optional<PolyCone> cone;
  std::optional<SdpData> sdp;

  std::optional<Vector> point;
  std::optional<Vector> xi;
  std::optional<Vector> start;
  std::optional<Vector> ybar;
  std::optional<double> delta;

  std::optional<Vector> lambda;
  std::optional<MultiplierMu> mu;
  std::optional<Matrix> Lambda;

  std::optional<GridSpec> oracle;

  Tolerances tol;
  ToleranceSources tol_sources;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Parses a schema-1 YAML document. Tolerances: defaults < SIVO_TOL_<NAME> environment < file.
ProblemFile parse_problem_text(const std::string& text, const std::string& source, const EnvLookup& env = {});
ProblemFile load_problem_file(const std::string& path, const EnvLookup& env = {});

/// Names of the shipped problems and their documents.
std::vector<std::string> builtin_names();
std::optional<std::string> builtin_text(const std::string& name);
ProblemFile load_builtin(const std::string& name, const EnvLookup& env = {});

std::string sha256_hex(const std::string& data);

/// Parses "1, 2.5, -1/pi" style lists and plain numbers via the expression grammar.
double parse_number(const std::string& text);

}  // namespace sivo::cli
