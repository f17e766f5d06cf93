#include "problem_file.hpp"

#include <array>
#include <utility>

namespace sivo::cli {

namespace {

// f1 = x^2 cos(1/x), f2 = 0, g_t(x) = t x on [1, 2]. Feasible set (-inf, 0].
constexpr const char* kScaledFamily = R"(schema: 1
name: example-3.1
space: {n: 1}
objectives:
  - sqcosinv(x)
  - "0"
constraints:
  - label: g
    expr: t*x
    index: {kind: interval, a: 1, b: 2, resolution: 201}
omega: {kind: whole}
xi: [0.1, 0.1]
point: [0]
delta: 0.5
oracle:
  lower: [-2]
  upper: [0]
  points: 10001
)";

// f1 = f2 = x^2 cos(1/x), g_t(x) = x - t on [0, 1]. Satisfies the KKT inclusion at 0
// with equal weights but is not a quasi-weak solution there.
constexpr const char* kShiftedFamily = R"(schema: 1
name: example-3.2
space: {n: 1}
objectives:
  - sqcosinv(x)
  - sqcosinv(x)
constraints:
  - label: g
    expr: x - t
    index: {kind: interval, a: 0, b: 1, resolution: 201}
omega: {kind: whole}
xi: [0.1, 0.1]
point: [0]
multipliers:
  lambda: [0.5, 0.5]
  mu: []
oracle:
  lower: [-2]
  upper: [0]
  points: 10001
  extra: [["-1/pi"]]
)";

constexpr std::array<std::pair<const char*, const char*>, 2> kBuiltins{{
    {"example-3.1", kScaledFamily},
    {"example-3.2", kShiftedFamily},
}};

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : kBuiltins) out.emplace_back(name);
  return out;
}

std::optional<std::string> builtin_text(const std::string& name) {
  for (const auto& [n, text] : kBuiltins)
    if (name == n) return std::string(text);
  return std::nullopt;
}

}  // namespace sivo::cli
