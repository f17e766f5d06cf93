#pragma once

#include "sivo/subdiff.hpp"
#include "sivo/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sivo {

/// A scalar function of one real variable whose nonsmooth points are declared
/// explicitly together with the Clarke subdifferential at each of them.
struct CustomAtom {
  struct Kink {
    double at;
    SubdiffSet subdiff;  // one-dimensional
  };

  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::vector<Kink> kinks;
};

/// Immutable name -> atom table. Share it through `std::shared_ptr<const AtomRegistry>`.
class AtomRegistry {
 public:
  AtomRegistry() = default;

  /// Registry holding only the built-in atoms (currently `sqcosinv`, x -> x^2 cos(1/x)).
  static std::shared_ptr<const AtomRegistry> builtins();

  AtomRegistry& add(CustomAtom atom);
  const CustomAtom* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, CustomAtom, std::less<>> atoms_;
};

namespace detail {
struct Node;
}

/// Expression tree over variables x1..xn and parameters t1..tk.
///
/// Grammar: numbers, x1..xn (x when n == 1), t1..tk (t when k == 1), + - * / ^,
/// smooth calls sin cos tan exp log sqrt, the nonsmooth forms max(...), min(...)
/// and abs(e), and registered atoms name(e). Nonsmooth subtrees may only be
/// combined linearly: summed, negated, or scaled by a factor that does not
/// depend on x. Arguments of max/min/abs/atoms must be smooth.
class Expr {
 public:
  struct Context {
    int num_vars = 1;
    int num_params = 0;
    std::shared_ptr<const AtomRegistry> atoms = AtomRegistry::builtins();
  };

  static Expr parse(std::string_view text, const Context& ctx);
  static Expr parse(std::string_view text, int num_vars, int num_params = 0) {
    return parse(text, Context{num_vars, num_params, AtomRegistry::builtins()});
  }

  static Expr constant(double c, int num_vars, int num_params = 0);

  /// The expression sum_j t_j * parts[j]; builds scalarized cone constraints.
  static Expr parameter_weighted_sum(const std::vector<Expr>& parts, int num_params);

  int num_vars() const noexcept { return num_vars_; }
  int num_params() const noexcept { return num_params_; }
  bool is_smooth() const noexcept;
  bool depends_on_x() const noexcept;
  std::string to_string() const;

  double eval(const Vector& x, const Vector& t = Vector()) const;
  /// Gradient in x. Throws PreconditionError on nonsmooth expressions.
  Vector gradient(const Vector& x, const Vector& t = Vector()) const;
  /// Clarke subdifferential in x via the sum, scaling and max rules.
  SubdiffSet clarke_subdiff(const Vector& x, const Vector& t = Vector(),
                            double activity_tol = 1e-8) const;

 private:
  Expr(std::shared_ptr<const detail::Node> root, int num_vars, int num_params)
      : root_(std::move(root)), num_vars_(num_vars), num_params_(num_params) {}

  void check_args(const Vector& x, const Vector& t) const;

  std::shared_ptr<const detail::Node> root_;
  int num_vars_ = 0;
  int num_params_ = 0;
};

/// Support function of the Clarke subdifferential, i.e. the upper directional derivative.
double dir_deriv_upper(const Expr& f, const Vector& x, const Vector& d,
                       const Vector& t = Vector(), double activity_tol = 1e-8);

struct NumericDirDerivOptions {
  /// Base points are drawn from balls of these radii around x.
  std::vector<double> radii{1e-2, 1e-3, 1e-4};
  std::size_t base_points = 2001;
  /// Step t_k = min(step_ratio * r, r^2 * step_ratio).
  double step_ratio = 1e-3;
  unsigned seed = 7;
};

struct NumericDirDeriv {
  double estimate;
  std::size_t samples;
};

/// Empirical limsup of (f(y + s d) - f(y)) / s for y near x and s -> 0: for each
/// radius the sup over sampled base points, then the inf over radii.
NumericDirDeriv numeric_dirderiv(const Expr& f, const Vector& x, const Vector& d,
                                 const NumericDirDerivOptions& opts = {},
                                 const Vector& t = Vector());

}  // namespace sivo
