#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fractsurf/interval.hpp"

namespace fractsurf {

enum class Var { x, y, t };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Axis-aligned box in (x, y, t). t is only meaningful for outer maps d(t).
struct Box {
  Interval x;
  Interval y;
  Interval t{0.0};
};

/// Immutable scalar expression over the variables x, y and t.
///
/// Expressions are small trees shared by value. They support point evaluation,
/// symbolic differentiation, substitution and interval evaluation; together
/// these give sampled values and sound Lipschitz bounds for every field kind
/// used in a fractal interpolation system (scaling fields, blends, free fields).
class Expr {
 public:
  Expr();  // constant zero
  Expr(double value);

  static Expr variable(Var v);

  double operator()(double x, double y, double t = 0.0) const;
  Interval range(const Box& box) const;
  Expr derivative(Var v) const;
  Expr substitute(Var v, const Expr& replacement) const;
  std::optional<double> constant_value() const;
  bool depends_on(Var v) const;
  std::string to_string() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;

  friend struct ExprAccess;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr abs(const Expr& a);
Expr tanh(const Expr& a);
Expr atan(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr sign(const Expr& a);
Expr pow(const Expr& a, double exponent);
Expr abspow(const Expr& a, double exponent);

/// Parses infix text such as "sin(pi^2*x*y)" or "0.9*tanh(t)".
///
/// Grammar: + - * / ^ (right-associative, constant exponent only), unary minus,
/// numbers, the variables x y t, the constants pi and e, and the functions
/// sin cos exp log sqrt abs tanh atan sinh cosh sign.
Expr parse_expression(std::string_view text);

}  // namespace fractsurf
