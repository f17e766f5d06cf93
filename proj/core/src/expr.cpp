#include "sivo/expr.hpp"

#include "sivo/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sivo {

namespace detail {

enum class Op { Const, Var, Param, Add, Sub, Mul, Div, Neg, Pow, Call, Max, Atom };
enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt };

using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int index = 0;       // Var / Param, 0-based
  Fn fn = Fn::Sin;     // Call
  const CustomAtom* atom = nullptr;
  std::shared_ptr<const AtomRegistry> registry;  // keeps `atom` alive
  std::vector<NodePtr> kids;
  bool smooth = true;
  bool has_x = false;
};

}  // namespace detail

using detail::Fn;
using detail::Node;
using detail::NodePtr;
using detail::Op;

namespace {

const char* fn_name(Fn fn) {
  switch (fn) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Tan: return "tan";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sqrt: return "sqrt";
  }
  return "?";
}

std::string number_string(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

std::string node_string(const Node& n) {
  switch (n.op) {
    case Op::Const: return n.value < 0 ? "(" + number_string(n.value) + ")" : number_string(n.value);
    case Op::Var: return "x" + std::to_string(n.index + 1);
    case Op::Param: return "t" + std::to_string(n.index + 1);
    case Op::Add: return "(" + node_string(*n.kids[0]) + " + " + node_string(*n.kids[1]) + ")";
    case Op::Sub: return "(" + node_string(*n.kids[0]) + " - " + node_string(*n.kids[1]) + ")";
    case Op::Mul: return "(" + node_string(*n.kids[0]) + " * " + node_string(*n.kids[1]) + ")";
    case Op::Div: return "(" + node_string(*n.kids[0]) + " / " + node_string(*n.kids[1]) + ")";
    case Op::Pow: return "(" + node_string(*n.kids[0]) + " ^ " + node_string(*n.kids[1]) + ")";
    case Op::Neg: return "(-" + node_string(*n.kids[0]) + ")";
    case Op::Call: return std::string(fn_name(n.fn)) + "(" + node_string(*n.kids[0]) + ")";
    case Op::Atom: return n.atom->name + "(" + node_string(*n.kids[0]) + ")";
    case Op::Max: {
      std::string s = "max(";
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += ", ";
        s += node_string(*n.kids[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_leaf(Op op, int index) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->index = index;
  n->has_x = op == Op::Var;
  return n;
}

// Builds an interior node and enforces the composition rules for nonsmooth
// subtrees. `pos` is only used for error messages.
NodePtr make_node(Op op, std::vector<NodePtr> kids, std::size_t pos, Fn fn = Fn::Sin) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->fn = fn;
  n->kids = std::move(kids);
  for (const auto& k : n->kids) {
    n->has_x = n->has_x || k->has_x;
    n->smooth = n->smooth && k->smooth;
  }
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Neg:
      break;
    case Op::Mul:
      if (!n->kids[0]->smooth && !n->kids[1]->smooth)
        throw ParseError("product of two nonsmooth terms is not supported", pos);
      if ((!n->kids[0]->smooth && n->kids[1]->has_x) || (!n->kids[1]->smooth && n->kids[0]->has_x))
        throw ParseError("a nonsmooth term may only be scaled by a factor independent of x", pos);
      break;
    case Op::Div:
      if (!n->kids[1]->smooth)
        throw ParseError("nonsmooth term in a denominator is not supported", pos);
      if (!n->kids[0]->smooth && n->kids[1]->has_x)
        throw ParseError("a nonsmooth term may only be divided by a factor independent of x", pos);
      break;
    case Op::Pow:
      if (!n->smooth) throw ParseError("power of a nonsmooth term is not supported", pos);
      break;
    case Op::Call:
      if (!n->smooth)
        throw ParseError(std::string(fn_name(fn)) + " of a nonsmooth term is not supported", pos);
      break;
    case Op::Max:
      if (n->kids.size() < 2) throw ParseError("max needs at least two arguments", pos);
      for (const auto& k : n->kids)
        if (!k->smooth) throw ParseError("max arguments must be smooth (no nested max/atoms)", pos);
      n->smooth = false;
      break;
    default:
      break;
  }
  return n;
}

NodePtr make_neg(NodePtr a, std::size_t pos) { return make_node(Op::Neg, {std::move(a)}, pos); }

class Parser {
 public:
  Parser(std::string_view text, const Expr::Context& ctx) : s_(text), ctx_(ctx) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (i_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[i_]) + "'", i_);
    return e;
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool accept(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", i_);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      std::size_t pos = i_;
      if (accept('+')) {
        lhs = make_node(Op::Add, {lhs, term()}, pos);
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, {lhs, term()}, pos);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      std::size_t pos = i_;
      if (accept('*')) {
        lhs = make_node(Op::Mul, {lhs, unary()}, pos);
      } else if (accept('/')) {
        lhs = make_node(Op::Div, {lhs, unary()}, pos);
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    std::size_t pos = i_;
    if (accept('-')) return make_neg(unary(), pos);
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    std::size_t pos = i_;
    if (accept('^')) return make_node(Op::Pow, {base, unary()}, pos);
    return base;
  }

  std::vector<NodePtr> arguments() {
    std::vector<NodePtr> args;
    if (accept(')')) return args;
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');
    return args;
  }

  NodePtr primary() {
    skip_ws();
    if (i_ >= s_.size()) throw ParseError("unexpected end of expression", i_);
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", i_);
  }

  NodePtr number() {
    const std::size_t start = i_;
    while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
      if (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
        i_ = j;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + i_, v);
    if (ec != std::errc() || ptr != s_.data() + i_) throw ParseError("malformed number", start);
    return make_const(v);
  }

  // Parses a decimal suffix like the "12" of "x12"; returns -1 if absent.
  static int index_suffix(std::string_view name, std::size_t prefix) {
    if (name.size() <= prefix) return -1;
    int v = 0;
    auto [ptr, ec] = std::from_chars(name.data() + prefix, name.data() + name.size(), v);
    if (ec != std::errc() || ptr != name.data() + name.size()) return -1;
    return v;
  }

  NodePtr identifier() {
    const std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    const std::string_view name = s_.substr(start, i_ - start);

    skip_ws();
    if (i_ < s_.size() && s_[i_] == '(') {
      ++i_;
      return call(name, start);
    }

    if (name == "pi") return make_const(3.14159265358979323846);
    if (name == "x" && ctx_.num_vars == 1) return make_leaf(Op::Var, 0);
    if (name == "t" && ctx_.num_params == 1) return make_leaf(Op::Param, 0);
    if (name[0] == 'x') {
      int k = index_suffix(name, 1);
      if (k >= 1 && k <= ctx_.num_vars) return make_leaf(Op::Var, k - 1);
      if (k >= 1) throw ParseError("variable " + std::string(name) + " exceeds dimension " + std::to_string(ctx_.num_vars), start);
    }
    if (name[0] == 't') {
      int k = index_suffix(name, 1);
      if (k >= 1 && k <= ctx_.num_params) return make_leaf(Op::Param, k - 1);
      if (k >= 1) throw ParseError("parameter " + std::string(name) + " exceeds index dimension " + std::to_string(ctx_.num_params), start);
    }
    throw ParseError("unknown symbol '" + std::string(name) + "'", start);
  }

  NodePtr call(std::string_view name, std::size_t pos) {
    std::vector<NodePtr> args = arguments();
    auto unary_arg = [&]() {
      if (args.size() != 1) throw ParseError(std::string(name) + " takes one argument", pos);
      return args[0];
    };
    static const std::pair<std::string_view, Fn> smooth_fns[] = {
        {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"tan", Fn::Tan},
        {"exp", Fn::Exp}, {"log", Fn::Log}, {"sqrt", Fn::Sqrt}};
    for (const auto& [fname, fn] : smooth_fns)
      if (name == fname) return make_node(Op::Call, {unary_arg()}, pos, fn);

    if (name == "max") return make_node(Op::Max, std::move(args), pos);
    if (name == "min") {
      // min(a, b, ...) = -max(-a, -b, ...)
      std::vector<NodePtr> neg;
      for (auto& a : args) neg.push_back(make_neg(a, pos));
      return make_neg(make_node(Op::Max, std::move(neg), pos), pos);
    }
    if (name == "abs") {
      NodePtr a = unary_arg();
      return make_node(Op::Max, {a, make_neg(a, pos)}, pos);
    }
    if (ctx_.atoms) {
      if (const CustomAtom* atom = ctx_.atoms->find(name)) {
        NodePtr a = unary_arg();
        if (!a->smooth) throw ParseError("argument of " + std::string(name) + " must be smooth", pos);
        auto n = std::make_shared<Node>();
        n->op = Op::Atom;
        n->atom = atom;
        n->registry = ctx_.atoms;
        n->kids = {a};
        n->has_x = a->has_x;
        n->smooth = false;
        return n;
      }
    }
    throw ParseError("unknown function '" + std::string(name) + "'", pos);
  }

  std::string_view s_;
  const Expr::Context& ctx_;
  std::size_t i_ = 0;
};

[[noreturn]] void domain_error(const Node& n, const std::string& why) {
  throw DomainError(why + " in " + node_string(n));
}

double eval_node(const Node& n, const Vector& x, const Vector& t) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x[n.index];
    case Op::Param: return t[n.index];
    case Op::Add: return eval_node(*n.kids[0], x, t) + eval_node(*n.kids[1], x, t);
    case Op::Sub: return eval_node(*n.kids[0], x, t) - eval_node(*n.kids[1], x, t);
    case Op::Mul: return eval_node(*n.kids[0], x, t) * eval_node(*n.kids[1], x, t);
    case Op::Neg: return -eval_node(*n.kids[0], x, t);
    case Op::Div: {
      const double den = eval_node(*n.kids[1], x, t);
      if (den == 0.0) domain_error(n, "division by zero");
      return eval_node(*n.kids[0], x, t) / den;
    }
    case Op::Pow: {
      const double b = eval_node(*n.kids[0], x, t);
      const double e = eval_node(*n.kids[1], x, t);
      if (b < 0.0 && e != std::floor(e)) domain_error(n, "negative base with non-integer exponent");
      if (b == 0.0 && e < 0.0) domain_error(n, "zero base with negative exponent");
      return std::pow(b, e);
    }
    case Op::Call: {
      const double a = eval_node(*n.kids[0], x, t);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Tan: return std::tan(a);
        case Fn::Exp: return std::exp(a);
        case Fn::Log:
          if (a <= 0.0) domain_error(n, "log of nonpositive value");
          return std::log(a);
        case Fn::Sqrt:
          if (a < 0.0) domain_error(n, "sqrt of negative value");
          return std::sqrt(a);
      }
      return 0.0;
    }
    case Op::Max: {
      double m = -std::numeric_limits<double>::infinity();
      for (const auto& k : n.kids) m = std::max(m, eval_node(*k, x, t));
      return m;
    }
    case Op::Atom: return n.atom->value(eval_node(*n.kids[0], x, t));
  }
  return 0.0;
}

struct ValueGrad {
  double v;
  Vector g;
};

// Forward-mode value and gradient of a smooth subtree.
ValueGrad grad_node(const Node& n, const Vector& x, const Vector& t) {
  const Eigen::Index dim = x.size();
  switch (n.op) {
    case Op::Const: return {n.value, Vector::Zero(dim)};
    case Op::Param: return {t[n.index], Vector::Zero(dim)};
    case Op::Var: {
      Vector g = Vector::Zero(dim);
      g[n.index] = 1.0;
      return {x[n.index], g};
    }
    case Op::Add: {
      auto a = grad_node(*n.kids[0], x, t);
      auto b = grad_node(*n.kids[1], x, t);
      return {a.v + b.v, a.g + b.g};
    }
    case Op::Sub: {
      auto a = grad_node(*n.kids[0], x, t);
      auto b = grad_node(*n.kids[1], x, t);
      return {a.v - b.v, a.g - b.g};
    }
    case Op::Neg: {
      auto a = grad_node(*n.kids[0], x, t);
      return {-a.v, -a.g};
    }
    case Op::Mul: {
      auto a = grad_node(*n.kids[0], x, t);
      auto b = grad_node(*n.kids[1], x, t);
      return {a.v * b.v, a.g * b.v + b.g * a.v};
    }
    case Op::Div: {
      auto a = grad_node(*n.kids[0], x, t);
      auto b = grad_node(*n.kids[1], x, t);
      if (b.v == 0.0) domain_error(n, "division by zero");
      return {a.v / b.v, (a.g * b.v - b.g * a.v) / (b.v * b.v)};
    }
    case Op::Pow: {
      auto a = grad_node(*n.kids[0], x, t);
      const double v = eval_node(n, x, t);
      if (!n.kids[1]->has_x) {
        const double e = eval_node(*n.kids[1], x, t);
        if (e == 0.0) return {v, Vector::Zero(dim)};
        if (a.v == 0.0 && e < 1.0) domain_error(n, "not differentiable at zero base");
        return {v, e * std::pow(a.v, e - 1.0) * a.g};
      }
      auto b = grad_node(*n.kids[1], x, t);
      if (a.v <= 0.0) domain_error(n, "variable exponent needs a positive base");
      const double la = std::log(a.v);
      return {v, v * (b.g * la + b.v * a.g / a.v)};
    }
    case Op::Call: {
      auto a = grad_node(*n.kids[0], x, t);
      switch (n.fn) {
        case Fn::Sin: return {std::sin(a.v), std::cos(a.v) * a.g};
        case Fn::Cos: return {std::cos(a.v), -std::sin(a.v) * a.g};
        case Fn::Tan: {
          const double c = std::cos(a.v);
          return {std::tan(a.v), a.g / (c * c)};
        }
        case Fn::Exp: {
          const double e = std::exp(a.v);
          return {e, e * a.g};
        }
        case Fn::Log:
          if (a.v <= 0.0) domain_error(n, "log of nonpositive value");
          return {std::log(a.v), a.g / a.v};
        case Fn::Sqrt: {
          if (a.v <= 0.0) domain_error(n, "sqrt not differentiable at nonpositive value");
          const double r = std::sqrt(a.v);
          return {r, a.g / (2.0 * r)};
        }
      }
      break;
    }
    case Op::Max:
    case Op::Atom:
      break;
  }
  throw PreconditionError("gradient requested for nonsmooth subexpression " + node_string(n));
}

SubdiffSet subdiff_node(const Node& n, const Vector& x, const Vector& t, double tol) {
  if (n.smooth) return SubdiffSet::singleton(grad_node(n, x, t).g);
  switch (n.op) {
    case Op::Add: return subdiff_node(*n.kids[0], x, t, tol) + subdiff_node(*n.kids[1], x, t, tol);
    case Op::Sub:
      return subdiff_node(*n.kids[0], x, t, tol) + subdiff_node(*n.kids[1], x, t, tol).scaled(-1.0);
    case Op::Neg: return subdiff_node(*n.kids[0], x, t, tol).scaled(-1.0);
    case Op::Mul: {
      // Exactly one side is nonsmooth and the other is independent of x.
      const bool left_nonsmooth = !n.kids[0]->smooth;
      const Node& set_side = *n.kids[left_nonsmooth ? 0 : 1];
      const Node& scale_side = *n.kids[left_nonsmooth ? 1 : 0];
      return subdiff_node(set_side, x, t, tol).scaled(eval_node(scale_side, x, t));
    }
    case Op::Div: {
      const double den = eval_node(*n.kids[1], x, t);
      if (den == 0.0) domain_error(n, "division by zero");
      return subdiff_node(*n.kids[0], x, t, tol).scaled(1.0 / den);
    }
    case Op::Max: {
      std::vector<ValueGrad> pieces;
      pieces.reserve(n.kids.size());
      double top = -std::numeric_limits<double>::infinity();
      for (const auto& k : n.kids) {
        pieces.push_back(grad_node(*k, x, t));
        top = std::max(top, pieces.back().v);
      }
      const double cut = top - tol * (std::abs(top) + 1.0);
      std::vector<Vector> gens;
      for (auto& p : pieces)
        if (p.v >= cut) gens.push_back(std::move(p.g));
      return SubdiffSet(unique_vectors(std::move(gens)));
    }
    case Op::Atom: {
      auto inner = grad_node(*n.kids[0], x, t);
      for (const auto& kink : n.atom->kinks) {
        if (std::abs(inner.v - kink.at) <= tol * (std::abs(kink.at) + 1.0)) {
          // One-dimensional set [lo, hi]; chain rule with the smooth inner map.
          double lo = std::numeric_limits<double>::infinity();
          double hi = -lo;
          for (const auto& g : kink.subdiff.generators()) {
            lo = std::min(lo, g[0]);
            hi = std::max(hi, g[0]);
          }
          lo -= kink.subdiff.ball_radius();
          hi += kink.subdiff.ball_radius();
          return SubdiffSet(unique_vectors({lo * inner.g, hi * inner.g}));
        }
      }
      return SubdiffSet::singleton(n.atom->derivative(inner.v) * inner.g);
    }
    default:
      break;
  }
  throw PreconditionError("unsupported nonsmooth node " + node_string(n));
}

}  // namespace

std::shared_ptr<const AtomRegistry> AtomRegistry::builtins() {
  static const std::shared_ptr<const AtomRegistry> reg = [] {
    auto r = std::make_shared<AtomRegistry>();
    CustomAtom sq;
    sq.name = "sqcosinv";
    sq.value = [](double u) { return u == 0.0 ? 0.0 : u * u * std::cos(1.0 / u); };
    sq.derivative = [](double u) {
      return u == 0.0 ? 0.0 : 2.0 * u * std::cos(1.0 / u) + std::sin(1.0 / u);
    };
    Vector lo(1), hi(1);
    lo << -1.0;
    hi << 1.0;
    sq.kinks.push_back({0.0, SubdiffSet({lo, hi})});
    r->add(std::move(sq));
    return std::shared_ptr<const AtomRegistry>(std::move(r));
  }();
  return reg;
}

AtomRegistry& AtomRegistry::add(CustomAtom atom) {
  if (atom.name.empty() || !atom.value || !atom.derivative)
    throw PreconditionError("custom atom needs a name, a value map and a derivative map");
  for (const auto& k : atom.kinks)
    if (k.subdiff.dim() != 1) throw PreconditionError("custom atom subdifferentials must be one-dimensional");
  std::string key = atom.name;
  atoms_.insert_or_assign(std::move(key), std::move(atom));
  return *this;
}

const CustomAtom* AtomRegistry::find(std::string_view name) const {
  auto it = atoms_.find(name);
  return it == atoms_.end() ? nullptr : &it->second;
}

std::vector<std::string> AtomRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : atoms_) out.push_back(k);
  return out;
}

Expr Expr::parse(std::string_view text, const Context& ctx) {
  if (ctx.num_vars < 1) throw PreconditionError("expressions need at least one variable");
  Parser p(text, ctx);
  return Expr(p.parse(), ctx.num_vars, ctx.num_params);
}

Expr Expr::constant(double c, int num_vars, int num_params) {
  return Expr(make_const(c), num_vars, num_params);
}

Expr Expr::parameter_weighted_sum(const std::vector<Expr>& parts, int num_params) {
  if (parts.empty()) throw PreconditionError("parameter_weighted_sum needs at least one part");
  if (static_cast<int>(parts.size()) > num_params)
    throw PreconditionError("more parts than parameters");
  NodePtr acc;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    NodePtr term = make_node(Op::Mul, {make_leaf(Op::Param, static_cast<int>(j)), parts[j].root_}, 0);
    acc = acc ? make_node(Op::Add, {acc, term}, 0) : term;
  }
  return Expr(acc, parts.front().num_vars_, num_params);
}

bool Expr::is_smooth() const noexcept { return root_->smooth; }
bool Expr::depends_on_x() const noexcept { return root_->has_x; }
std::string Expr::to_string() const { return node_string(*root_); }

void Expr::check_args(const Vector& x, const Vector& t) const {
  if (x.size() != num_vars_)
    throw PreconditionError("point has dimension " + std::to_string(x.size()) + ", expected " +
                            std::to_string(num_vars_));
  if (t.size() < num_params_)
    throw PreconditionError("expression " + to_string() + " needs " + std::to_string(num_params_) +
                            " parameter values");
}

double Expr::eval(const Vector& x, const Vector& t) const {
  check_args(x, t);
  return eval_node(*root_, x, t);
}

Vector Expr::gradient(const Vector& x, const Vector& t) const {
  check_args(x, t);
  return grad_node(*root_, x, t).g;
}

SubdiffSet Expr::clarke_subdiff(const Vector& x, const Vector& t, double activity_tol) const {
  check_args(x, t);
  return subdiff_node(*root_, x, t, activity_tol);
}

double dir_deriv_upper(const Expr& f, const Vector& x, const Vector& d, const Vector& t,
                       double activity_tol) {
  const SubdiffSet s = f.clarke_subdiff(x, t, activity_tol);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& g : s.generators()) best = std::max(best, g.dot(d));
  return best + s.ball_radius() * d.norm();
}

NumericDirDeriv numeric_dirderiv(const Expr& f, const Vector& x, const Vector& d,
                                 const NumericDirDerivOptions& opts, const Vector& t) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Eigen::Index n = x.size();
  double inf_over_radii = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  for (double r : opts.radii) {
    const double step = std::min(opts.step_ratio * r, opts.step_ratio * r * r);
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < opts.base_points; ++k) {
      Vector y = x;
      if (k > 0) {
        if (n == 1) {
          // uniform grid over [x - r, x + r], offset so that irrational phases are hit
          const double s = -1.0 + 2.0 * (static_cast<double>(k) - 0.5) / static_cast<double>(opts.base_points);
          y[0] += r * s;
        } else {
          for (Eigen::Index i = 0; i < n; ++i) y[i] += r * unif(rng);
        }
      }
      try {
        const double q = (f.eval(y + step * d, t) - f.eval(y, t)) / step;
        sup = std::max(sup, q);
        ++samples;
      } catch (const DomainError&) {
        // points outside the domain are skipped
      }
    }
    inf_over_radii = std::min(inf_over_radii, sup);
  }
  return {inf_over_radii, samples};
}

std::string format_vector(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += number_string(v[i]);
  }
  return s + ")";
}

}  // namespace sivo
