#pragma once

#include "problem_file.hpp"
#include "report.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace sivo::cli {

enum ExitCode : int { kHolds = 0, kViolated = 1, kInconclusive = 2, kInputError = 3 };

struct CommandResult {
  int exit_code = kInconclusive;
  std::string verdict;
  Json result;
  std::string text;
};

int exit_code_of(Verdict v);

CommandResult cmd_check(const ProblemFile& pf, const Vector& point, const Vector& xi, bool search);
CommandResult cmd_fuzzy(const ProblemFile& pf, const Vector& point, const Vector& xi, double delta);
/// `ai` is 1-based; absent for condition (U).
CommandResult cmd_cq(const ProblemFile& pf, const Vector& point, std::optional<int> ai);
CommandResult cmd_classify(const ProblemFile& pf, const Vector& point, const Vector& xi, Notion notion, double slack,
                           const std::optional<Vector>& ybar);
CommandResult cmd_exists(const ProblemFile& pf, const Vector& xi, bool quasi, const std::optional<Vector>& start,
                         const std::optional<std::string>& front_csv);
CommandResult cmd_suffice(const ProblemFile& pf, const Vector& point, const Vector& xi, SufficiencyMode mode);
CommandResult cmd_convexity(const ProblemFile& pf, const Vector& point, const std::vector<Vector>& samples, bool strict);
CommandResult cmd_sdp(const ProblemFile& pf, const Vector& point, const Vector& xi, bool search);
CommandResult cmd_example(const std::string& name, const EnvLookup& env = {});
CommandResult cmd_verify(const Json& report);

/// Full command line: parses arguments, runs the command, prints the text report to
/// `out`, diagnostics to `err`, and writes the JSON report when --json is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const EnvLookup& env = {});

/// Parses "a,b,c" where each entry is a number or a constant expression.
Vector parse_vector_arg(const std::string& text);

}  // namespace sivo::cli
