#include "fractsurf/scaling_fields.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fractsurf/errors.hpp"

namespace fractsurf {

namespace {

constexpr double kBoundaryTolerance = 1e-10;

std::string cell_name(CellIndex c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

Expr edge_factor(Var v, double knot, double exponent) {
  const Expr u = Expr::variable(v) - Expr(knot);
  if (exponent == std::round(exponent)) return pow(u, exponent);
  return abspow(u, exponent);
}

void check_boundary_zero(const ScalingField& f, int samples) {
  const Rect& r = f.rect();
  double worst = 0.0;
  Point2 at;
  auto probe = [&](double x, double y) {
    const double v = std::abs(f(x, y));
    if (!(v <= worst)) {
      worst = v;
      at = {x, y};
    }
  };
  for (int k = 0; k <= samples; ++k) {
    const double tx = r.x0 + r.width() * k / samples;
    const double ty = r.y0 + r.height() * k / samples;
    probe(r.x0, ty);
    probe(r.x1, ty);
    probe(tx, r.y0);
    probe(tx, r.y1);
  }
  if (!(worst < kBoundaryTolerance)) {
    std::ostringstream msg;
    msg << "scaling field " << cell_name(f.cell()) << " does not vanish on the cell boundary: |s("
        << at.x << ", " << at.y << ")| = " << worst;
    throw BoundaryViolation(msg.str(), at, worst);
  }
}

bool is_identity_map(const Expr& outer) {
  const Expr d = outer.derivative(Var::t);
  const auto slope = d.constant_value();
  return slope && *slope == 1.0 && outer(0, 0, 0.0) == 0.0 && !outer.depends_on(Var::x) &&
         !outer.depends_on(Var::y);
}

// Golden-section search for an extremum of g on [lo, hi].
double golden_section(const std::function<double(double)>& g, double lo, double hi, bool maximize) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  auto score = [&](double t) { return maximize ? -g(t) : g(t); };
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = score(c);
  double fd = score(d);
  for (int it = 0; it < 60 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = score(d);
    }
  }
  return (a + b) / 2;
}

Point2 polish(const ScalingField& f, Point2 start, double hx, double hy, const Rect& box,
              bool maximize) {
  auto value = [&](Point2 p) { return std::abs(f(p)); };
  auto better = [&](double cand, double best) { return maximize ? cand > best : cand < best; };
  Point2 best = start;
  double best_value = value(start);
  for (int sweep = 0; sweep < 3; ++sweep) {
    const double xl = std::max(box.x0, best.x - hx);
    const double xh = std::min(box.x1, best.x + hx);
    const double x = golden_section([&](double t) { return value({t, best.y}); }, xl, xh, maximize);
    if (better(value({x, best.y}), best_value)) {
      best.x = x;
      best_value = value(best);
    }
    const double yl = std::max(box.y0, best.y - hy);
    const double yh = std::min(box.y1, best.y + hy);
    const double y = golden_section([&](double t) { return value({best.x, t}); }, yl, yh, maximize);
    if (better(value({best.x, y}), best_value)) {
      best.y = y;
      best_value = value(best);
    }
  }
  return best;
}

}  // namespace

const char* to_string(ScalingForm form) {
  switch (form) {
    case ScalingForm::separable_quartic: return "separable-quartic";
    case ScalingForm::polynomial_product: return "polynomial-product";
    case ScalingForm::expression: return "expression";
  }
  return "?";
}

ScalingField finish_field(ScalingField f, const SamplingOptions& options) {
  check_boundary_zero(f, options.boundary_samples);
  f.gradient_ = gradient_bound(f.expr_, f.rect_, options.bound_subdivisions);
  f.certificate_ = certify_magnitude(f, options);
  return f;
}

ScalingField make_separable_quartic(CellIndex cell, const Rect& rect, double coefficient,
                                    const SamplingOptions& options) {
  ScalingField f;
  f.cell_ = cell;
  f.rect_ = rect;
  f.form_ = ScalingForm::separable_quartic;
  f.coefficient_ = coefficient;
  const Expr x = Expr::variable(Var::x);
  const Expr y = Expr::variable(Var::y);
  f.expr_ = Expr(coefficient) * (x - Expr(rect.x0)) * (x - Expr(rect.x1)) * (y - Expr(rect.y0)) *
            (y - Expr(rect.y1));
  return finish_field(std::move(f), options);
}

ScalingField build_product_field(CellIndex cell, const Rect& rect, const Expr& psi,
                                  EdgeExponents exponents, const Expr& outer,
                                  const SamplingOptions& options) {
  for (double e : {exponents.x_upper, exponents.x_lower, exponents.y_upper, exponents.y_lower}) {
    if (!(e >= 1.0)) {
      throw std::invalid_argument("scaling field " + cell_name(cell) +
                                  ": edge exponents must be >= 1 for a Lipschitz field, got " +
                                  std::to_string(e));
    }
  }
  if (outer.depends_on(Var::x) || outer.depends_on(Var::y)) {
    throw std::invalid_argument("scaling field " + cell_name(cell) +
                                ": outer map must be an expression in t only");
  }
  if (std::abs(outer(0, 0, 0.0)) > 1e-15) {
    throw std::invalid_argument("scaling field " + cell_name(cell) + ": outer map has d(0) = " +
                                std::to_string(outer(0, 0, 0.0)) + ", expected 0");
  }
  const auto psi_const = psi.constant_value();
  const bool unit = exponents == EdgeExponents{};
  if (psi_const && unit && is_identity_map(outer)) {
    return make_separable_quartic(cell, rect, *psi_const, options);
  }

  const Expr t = psi * edge_factor(Var::x, rect.x1, exponents.x_upper) *
                 edge_factor(Var::x, rect.x0, exponents.x_lower) *
                 edge_factor(Var::y, rect.y1, exponents.y_upper) *
                 edge_factor(Var::y, rect.y0, exponents.y_lower);
  ScalingField f;
  f.cell_ = cell;
  f.rect_ = rect;
  f.form_ = ScalingForm::polynomial_product;
  f.coefficient_ = psi_const.value_or(0.0);
  f.expr_ = outer.substitute(Var::t, t);
  return finish_field(std::move(f), options);
}

ScalingField make_expression_field(CellIndex cell, const Rect& rect, const Expr& s,
                                   const SamplingOptions& options) {
  if (s.depends_on(Var::t)) {
    throw std::invalid_argument("scaling field " + cell_name(cell) +
                                ": expression may only use x and y");
  }
  ScalingField f;
  f.cell_ = cell;
  f.rect_ = rect;
  f.form_ = ScalingForm::expression;
  f.expr_ = s;
  return finish_field(std::move(f), options);
}

double sampled_sup(const ScalingField& field, int intervals, Point2* witness) {
  const Rect& r = field.rect();
  double best = -1.0;
  Point2 at = r.center();
  for (int a = 0; a <= intervals; ++a) {
    const double x = a == intervals ? r.x1 : r.x0 + r.width() * a / intervals;
    for (int b = 0; b <= intervals; ++b) {
      const double y = b == intervals ? r.y1 : r.y0 + r.height() * b / intervals;
      const double v = std::abs(field(x, y));
      if (v > best || std::isnan(v)) {
        best = v;
        at = {x, y};
        if (std::isnan(v)) break;
      }
    }
  }
  if (witness) *witness = at;
  return best;
}

MagnitudeCertificate certify_magnitude(const ScalingField& field, const SamplingOptions& options) {
  MagnitudeCertificate cert;
  const Rect& r = field.rect();
  if (field.form() == ScalingForm::separable_quartic) {
    const double hx = r.width() / 2;
    const double hy = r.height() / 2;
    cert.analytic = true;
    cert.sup_abs = std::abs(field.coefficient()) * hx * hx * hy * hy;
    cert.sampled_sup = cert.sup_abs;
    cert.witness = r.center();
  } else {
    cert.sampled_sup = sampled_sup(field, options.certify_intervals, &cert.witness);
    const double hx = r.width() / options.certify_intervals;
    const double hy = r.height() / options.certify_intervals;
    const double lipschitz = gradient_bound(field.expr(), r, options.bound_subdivisions).taxicab();
    cert.slack = lipschitz * (hx + hy) / 2;
    const double by_sampling = cert.sampled_sup + cert.slack;
    const double by_intervals = range_bound(field.expr(), r, options.bound_subdivisions).mag();
    cert.sup_abs = std::min(by_sampling, by_intervals);
    if (std::isnan(cert.sampled_sup)) cert.sup_abs = cert.sampled_sup;
  }
  if (!(cert.sup_abs < 1.0)) {
    std::ostringstream msg;
    msg << "scaling field " << cell_name(field.cell()) << " is not certified |s| < 1: ";
    if (cert.sampled_sup >= 1.0 || cert.analytic || std::isnan(cert.sampled_sup)) {
      msg << "|s(" << cert.witness.x << ", " << cert.witness.y << ")| = " << cert.sampled_sup;
    } else {
      msg << "bound " << cert.sup_abs << " (sampled " << cert.sampled_sup << " at ("
          << cert.witness.x << ", " << cert.witness.y << "), slack " << cert.slack << ")";
    }
    throw MagnitudeViolation(msg.str(), cert.witness, cert.sup_abs);
  }
  return cert;
}

InteriorExtrema interior_extrema(const ScalingField& field, double epsilon, int intervals) {
  const Rect& r = field.rect();
  const double half_min = std::min(r.width(), r.height()) / 2;
  if (!(epsilon > 0.0 && epsilon < half_min)) {
    throw std::invalid_argument("interior_extrema: epsilon must lie in (0, " +
                                std::to_string(half_min) + ")");
  }
  const Rect box = r.shrunk(epsilon);
  const double hx = box.width() / intervals;
  const double hy = box.height() / intervals;

  InteriorExtrema out;
  out.epsilon = epsilon;
  double hi = -1.0;
  double lo = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= intervals; ++a) {
    const double x = a == intervals ? box.x1 : box.x0 + hx * a;
    for (int b = 0; b <= intervals; ++b) {
      const double y = b == intervals ? box.y1 : box.y0 + hy * b;
      const double v = std::abs(field(x, y));
      if (v > hi) {
        hi = v;
        out.argmax = {x, y};
      }
      if (v < lo) {
        lo = v;
        out.argmin = {x, y};
      }
    }
  }
  out.argmax = polish(field, out.argmax, hx, hy, box, true);
  out.argmin = polish(field, out.argmin, hx, hy, box, false);
  out.s_bar = std::max(hi, std::abs(field(out.argmax)));
  out.s_underbar = std::min(lo, std::abs(field(out.argmin)));
  return out;
}

}  // namespace fractsurf
