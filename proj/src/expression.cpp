#include "fractsurf/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace fractsurf {

namespace {

enum class Op {
  constant,
  variable,
  add,
  sub,
  mul,
  div,
  neg,
  sin,
  cos,
  exp,
  log,
  sqrt,
  abs,
  tanh,
  atan,
  sinh,
  cosh,
  sign,
  pow,
  abspow,
};

}  // namespace

struct Expr::Node {
  Op op = Op::constant;
  double param = 0.0;  // constant value or exponent
  Var var = Var::x;
  std::vector<Expr> args;
};

struct ExprAccess {
  static Expr wrap(std::shared_ptr<const Expr::Node> n) { return Expr(std::move(n)); }
};

namespace {

Expr make(Op op, const Expr& a, double param = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = {a};
  n->param = param;
  return ExprAccess::wrap(std::move(n));
}

Expr make(Op op, const Expr& a, const Expr& b) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = {a, b};
  return ExprAccess::wrap(std::move(n));
}

bool is_binary(Op op) { return op == Op::add || op == Op::sub || op == Op::mul || op == Op::div; }

double apply_unary(Op op, double v, double p) {
  switch (op) {
    case Op::neg: return -v;
    case Op::sin: return std::sin(v);
    case Op::cos: return std::cos(v);
    case Op::exp: return std::exp(v);
    case Op::log: return std::log(v);
    case Op::sqrt: return std::sqrt(v);
    case Op::abs: return std::abs(v);
    case Op::tanh: return std::tanh(v);
    case Op::atan: return std::atan(v);
    case Op::sinh: return std::sinh(v);
    case Op::cosh: return std::cosh(v);
    case Op::sign: return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    case Op::pow: return std::pow(v, p);
    case Op::abspow: return std::pow(std::abs(v), p);
    default: return std::nan("");
  }
}

Interval apply_unary(Op op, const Interval& v, double p) {
  switch (op) {
    case Op::neg: return -v;
    case Op::sin: return sin(v);
    case Op::cos: return cos(v);
    case Op::exp: return exp(v);
    case Op::log: return log(v);
    case Op::sqrt: return sqrt(v);
    case Op::abs: return abs(v);
    case Op::tanh: return tanh(v);
    case Op::atan: return atan(v);
    case Op::sinh: return sinh(v);
    case Op::cosh: return cosh(v);
    case Op::sign: return sign(v);
    case Op::pow: return pow(v, p);
    case Op::abspow: return abspow(v, p);
    default: return Interval::entire();
  }
}

Expr unary(Op op, const Expr& a, double p = 0.0) {
  if (auto c = a.constant_value()) return Expr(apply_unary(op, *c, p));
  return make(op, a, p);
}

const char* function_name(Op op) {
  switch (op) {
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sqrt: return "sqrt";
    case Op::abs: return "abs";
    case Op::tanh: return "tanh";
    case Op::atan: return "atan";
    case Op::sinh: return "sinh";
    case Op::cosh: return "cosh";
    case Op::sign: return "sign";
    case Op::abspow: return "abspow";
    default: return "?";
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->param = value;
  node_ = std::move(n);
}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->var = v;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

std::optional<double> Expr::constant_value() const {
  if (node_->op == Op::constant) return node_->param;
  return std::nullopt;
}

double Expr::operator()(double x, double y, double t) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::constant: return n.param;
    case Op::variable: return n.var == Var::x ? x : (n.var == Var::y ? y : t);
    case Op::add: return n.args[0](x, y, t) + n.args[1](x, y, t);
    case Op::sub: return n.args[0](x, y, t) - n.args[1](x, y, t);
    case Op::mul: return n.args[0](x, y, t) * n.args[1](x, y, t);
    case Op::div: return n.args[0](x, y, t) / n.args[1](x, y, t);
    default: return apply_unary(n.op, n.args[0](x, y, t), n.param);
  }
}

Interval Expr::range(const Box& box) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::constant: return Interval(n.param);
    case Op::variable: return n.var == Var::x ? box.x : (n.var == Var::y ? box.y : box.t);
    case Op::add: return n.args[0].range(box) + n.args[1].range(box);
    case Op::sub: return n.args[0].range(box) - n.args[1].range(box);
    case Op::mul: {
      // x*x style squares would lose the sign information; handle the common case.
      if (n.args[0].node_ == n.args[1].node_) return pow(n.args[0].range(box), 2.0);
      return n.args[0].range(box) * n.args[1].range(box);
    }
    case Op::div: return n.args[0].range(box) / n.args[1].range(box);
    default: return apply_unary(n.op, n.args[0].range(box), n.param);
  }
}

bool Expr::depends_on(Var v) const {
  const Node& n = *node_;
  if (n.op == Op::constant) return false;
  if (n.op == Op::variable) return n.var == v;
  if (is_binary(n.op)) return n.args[0].depends_on(v) || n.args[1].depends_on(v);
  return n.args[0].depends_on(v);
}

Expr Expr::derivative(Var v) const {
  const Node& n = *node_;
  if (!depends_on(v)) return Expr(0.0);
  if (n.op == Op::variable) return Expr(1.0);
  const Expr& a = n.args[0];
  const Expr& b = n.args.size() > 1 ? n.args[1] : a;
  switch (n.op) {
    case Op::constant:
    case Op::variable: return Expr(0.0);
    case Op::add: return a.derivative(v) + b.derivative(v);
    case Op::sub: return a.derivative(v) - b.derivative(v);
    case Op::mul: return a.derivative(v) * b + a * b.derivative(v);
    case Op::div: return a.derivative(v) / b - a * b.derivative(v) / (b * b);
    case Op::neg: return -a.derivative(v);
    case Op::sin: return cos(a) * a.derivative(v);
    case Op::cos: return -(sin(a) * a.derivative(v));
    case Op::exp: return *this * a.derivative(v);
    case Op::log: return a.derivative(v) / a;
    case Op::sqrt: return a.derivative(v) / (Expr(2.0) * *this);
    case Op::abs: return sign(a) * a.derivative(v);
    case Op::tanh: return (Expr(1.0) - *this * *this) * a.derivative(v);
    case Op::atan: return a.derivative(v) / (Expr(1.0) + a * a);
    case Op::sinh: return cosh(a) * a.derivative(v);
    case Op::cosh: return sinh(a) * a.derivative(v);
    case Op::sign: return Expr(0.0);
    case Op::pow: return Expr(n.param) * pow(a, n.param - 1.0) * a.derivative(v);
    case Op::abspow:
      return Expr(n.param) * sign(a) * abspow(a, n.param - 1.0) * a.derivative(v);
  }
  return Expr(0.0);
}

Expr Expr::substitute(Var v, const Expr& replacement) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::constant: return *this;
    case Op::variable: return n.var == v ? replacement : *this;
    case Op::add: return n.args[0].substitute(v, replacement) + n.args[1].substitute(v, replacement);
    case Op::sub: return n.args[0].substitute(v, replacement) - n.args[1].substitute(v, replacement);
    case Op::mul: return n.args[0].substitute(v, replacement) * n.args[1].substitute(v, replacement);
    case Op::div: return n.args[0].substitute(v, replacement) / n.args[1].substitute(v, replacement);
    default: return unary(n.op, n.args[0].substitute(v, replacement), n.param);
  }
}

std::string Expr::to_string() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::constant: return n.param < 0 ? "(" + format_number(n.param) + ")" : format_number(n.param);
    case Op::variable: return n.var == Var::x ? "x" : (n.var == Var::y ? "y" : "t");
    case Op::add: return "(" + n.args[0].to_string() + " + " + n.args[1].to_string() + ")";
    case Op::sub: return "(" + n.args[0].to_string() + " - " + n.args[1].to_string() + ")";
    case Op::mul: return n.args[0].to_string() + "*" + n.args[1].to_string();
    case Op::div: return n.args[0].to_string() + "/" + n.args[1].to_string();
    case Op::neg: return "-(" + n.args[0].to_string() + ")";
    case Op::pow: return "(" + n.args[0].to_string() + ")^" + format_number(n.param);
    case Op::abspow: return "abspow(" + n.args[0].to_string() + ", " + format_number(n.param) + ")";
    default: return std::string(function_name(n.op)) + "(" + n.args[0].to_string() + ")";
  }
}

Expr operator+(const Expr& a, const Expr& b) {
  const auto ca = a.constant_value();
  const auto cb = b.constant_value();
  if (ca && cb) return Expr(*ca + *cb);
  if (ca && *ca == 0.0) return b;
  if (cb && *cb == 0.0) return a;
  return make(Op::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  const auto ca = a.constant_value();
  const auto cb = b.constant_value();
  if (ca && cb) return Expr(*ca - *cb);
  if (cb && *cb == 0.0) return a;
  if (ca && *ca == 0.0) return -b;
  return make(Op::sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  const auto ca = a.constant_value();
  const auto cb = b.constant_value();
  if (ca && cb) return Expr(*ca * *cb);
  if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return Expr(0.0);
  if (ca && *ca == 1.0) return b;
  if (cb && *cb == 1.0) return a;
  return make(Op::mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  const auto ca = a.constant_value();
  const auto cb = b.constant_value();
  if (ca && cb) return Expr(*ca / *cb);
  if (ca && *ca == 0.0) return Expr(0.0);
  if (cb && *cb == 1.0) return a;
  return make(Op::div, a, b);
}

Expr operator-(const Expr& a) { return unary(Op::neg, a); }

Expr sin(const Expr& a) { return unary(Op::sin, a); }
Expr cos(const Expr& a) { return unary(Op::cos, a); }
Expr exp(const Expr& a) { return unary(Op::exp, a); }
Expr log(const Expr& a) { return unary(Op::log, a); }
Expr sqrt(const Expr& a) { return unary(Op::sqrt, a); }
Expr abs(const Expr& a) { return unary(Op::abs, a); }
Expr tanh(const Expr& a) { return unary(Op::tanh, a); }
Expr atan(const Expr& a) { return unary(Op::atan, a); }
Expr sinh(const Expr& a) { return unary(Op::sinh, a); }
Expr cosh(const Expr& a) { return unary(Op::cosh, a); }
Expr sign(const Expr& a) { return unary(Op::sign, a); }

Expr pow(const Expr& a, double exponent) {
  if (exponent == 0.0) return Expr(1.0);
  if (exponent == 1.0) return a;
  return unary(Op::pow, a, exponent);
}

Expr abspow(const Expr& a, double exponent) {
  if (exponent == 0.0) return Expr(1.0);
  return unary(Op::abspow, a, exponent);
}

// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_product();
      } else if (accept('-')) {
        lhs = lhs - parse_product();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        lhs = lhs / parse_unary();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) {
      const std::size_t at = pos_;
      Expr exponent = parse_unary();
      auto c = exponent.constant_value();
      if (!c) throw ParseError("exponent must be a constant", at);
      return pow(base, *c);
    }
    return base;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return Expr(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return Expr::variable(Var::x);
    if (name == "y") return Expr::variable(Var::y);
    if (name == "t") return Expr::variable(Var::t);
    if (name == "pi") return Expr(std::numbers::pi);
    if (name == "e") return Expr(std::numbers::e);

    using Fn = Expr (*)(const Expr&);
    struct Entry {
      std::string_view name;
      Fn fn;
    };
    static constexpr Entry kFunctions[] = {
        {"sin", &sin},   {"cos", &cos},   {"exp", &exp},   {"log", &log},
        {"sqrt", &sqrt}, {"abs", &abs},   {"tanh", &tanh}, {"atan", &atan},
        {"sinh", &sinh}, {"cosh", &cosh}, {"sign", &sign},
    };
    for (const auto& f : kFunctions) {
      if (f.name == name) {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        Expr arg = parse_sum();
        if (!accept(')')) fail("expected ')'");
        return f.fn(arg);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

}  // namespace fractsurf
