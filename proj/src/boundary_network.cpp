#include "fractsurf/boundary_network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fractsurf/errors.hpp"

namespace fractsurf {

namespace {

constexpr double kCurveTolerance = 1e-12;
constexpr double kCornerTolerance = 1e-9;

// Size of the largest term of p at t, so tolerances scale with cancellation.
double term_scale(const Polynomial& p, double t) {
  double scale = 1.0;
  double power = 1.0;
  for (double c : p.coefficients) {
    scale = std::max(scale, std::abs(c * power));
    power *= t;
  }
  return scale;
}

Polynomial linear_piece(double t0, double z0, double t1, double z1) {
  const double slope = (z1 - z0) / (t1 - t0);
  return Polynomial{{z0 - slope * t0, slope}};
}

std::string cell_name(CellIndex c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

}  // namespace

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Expr Polynomial::as_expr(Var v) const {
  const Expr t = Expr::variable(v);
  Expr acc(0.0);
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + Expr(*it);
  return acc;
}

const char* to_string(CurveMethod method) {
  switch (method) {
    case CurveMethod::linear: return "linear";
    case CurveMethod::quadratic: return "quadratic";
    case CurveMethod::pieces: return "pieces";
  }
  return "?";
}

const char* to_string(BlendForm form) {
  return form == BlendForm::coons ? "coons" : "explicit";
}

BoundaryCurve::BoundaryCurve(CurveAxis axis, int index, CurveMethod method,
                             std::vector<double> knots, std::vector<Polynomial> pieces)
    : axis_(axis), index_(index), method_(method), knots_(std::move(knots)), pieces_(std::move(pieces)) {
  if (pieces_.size() + 1 != knots_.size()) {
    throw CurveError(name() + ": expected " + std::to_string(knots_.size() - 1) + " pieces, got " +
                     std::to_string(pieces_.size()));
  }
}

std::string BoundaryCurve::name() const {
  return (axis_ == CurveAxis::x_line ? "q_" : "r_") + std::to_string(index_);
}

int BoundaryCurve::piece_index(double t) const {
  const auto it = std::lower_bound(knots_.begin() + 1, knots_.end(), t);
  const auto k = std::min<std::ptrdiff_t>(it - knots_.begin(),
                                          static_cast<std::ptrdiff_t>(knots_.size()) - 1);
  return static_cast<int>(k);
}

double BoundaryCurve::operator()(double t) const { return piece(piece_index(t))(t); }

BoundaryCurves build_boundary_curves(const DataGrid& grid, CurveMethod method,
                                     const CurvePieces* pieces) {
  const int n = grid.n();
  const int m = grid.m();
  const std::vector<double> xs(grid.x_knots().begin(), grid.x_knots().end());
  const std::vector<double> ys(grid.y_knots().begin(), grid.y_knots().end());
  BoundaryCurves out;

  if (method == CurveMethod::linear) {
    for (int a = 0; a <= n; ++a) {
      std::vector<Polynomial> ps;
      for (int j = 1; j <= m; ++j) ps.push_back(linear_piece(ys[j - 1], grid.z(a, j - 1), ys[j], grid.z(a, j)));
      out.q.emplace_back(CurveAxis::x_line, a, method, ys, std::move(ps));
    }
    for (int b = 0; b <= m; ++b) {
      std::vector<Polynomial> ps;
      for (int i = 1; i <= n; ++i) ps.push_back(linear_piece(xs[i - 1], grid.z(i - 1, b), xs[i], grid.z(i, b)));
      out.r.emplace_back(CurveAxis::y_line, b, method, xs, std::move(ps));
    }
    return out;
  }

  if (pieces == nullptr) {
    throw CurveError(std::string("curve method '") + to_string(method) + "' needs explicit pieces");
  }
  if (pieces->q.size() != static_cast<std::size_t>(n + 1) ||
      pieces->r.size() != static_cast<std::size_t>(m + 1)) {
    throw CurveError("expected " + std::to_string(n + 1) + " q curves and " + std::to_string(m + 1) +
                     " r curves, got " + std::to_string(pieces->q.size()) + " and " +
                     std::to_string(pieces->r.size()));
  }

  std::vector<std::string> problems;
  auto check_curve = [&](const BoundaryCurve& curve, const std::vector<double>& knots, auto z_at) {
    const char var = curve.axis() == CurveAxis::x_line ? 'y' : 'x';
    for (int k = 1; k <= curve.piece_count(); ++k) {
      const Polynomial& p = curve.piece(k);
      if (method == CurveMethod::quadratic && p.degree() > 2) {
        problems.push_back(curve.name() + " piece " + std::to_string(k) + ": degree " +
                           std::to_string(p.degree()) + " exceeds 2");
      }
      for (int end : {k - 1, k}) {
        const double t = knots[static_cast<std::size_t>(end)];
        const double value = p(t);
        const double expected = z_at(end);
        if (!(std::abs(value - expected) <= kCurveTolerance * term_scale(p, t))) {
          std::ostringstream msg;
          msg << curve.name() << " piece " << k << " at junction " << var << "_" << end << " = " << t
              << ": value " << value << ", data " << expected;
          problems.push_back(msg.str());
        }
      }
      if (k < curve.piece_count()) {
        const double t = knots[static_cast<std::size_t>(k)];
        const double jump = std::abs(p(t) - curve.piece(k + 1)(t));
        if (!(jump <= kCurveTolerance * std::max(term_scale(p, t), term_scale(curve.piece(k + 1), t)))) {
          std::ostringstream msg;
          msg << curve.name() << " discontinuous at junction " << var << "_" << k << " = " << t
              << " (jump " << jump << ")";
          problems.push_back(msg.str());
        }
      }
    }
  };

  for (int a = 0; a <= n; ++a) {
    try {
      out.q.emplace_back(CurveAxis::x_line, a, method, ys, pieces->q[static_cast<std::size_t>(a)]);
    } catch (const CurveError& e) {
      problems.push_back(e.what());
      continue;
    }
    check_curve(out.q.back(), ys, [&](int l) { return grid.z(a, l); });
  }
  for (int b = 0; b <= m; ++b) {
    try {
      out.r.emplace_back(CurveAxis::y_line, b, method, xs, pieces->r[static_cast<std::size_t>(b)]);
    } catch (const CurveError& e) {
      problems.push_back(e.what());
      continue;
    }
    check_curve(out.r.back(), xs, [&](int k) { return grid.z(k, b); });
  }
  if (!problems.empty()) {
    std::string msg = "boundary curves do not interpolate the data:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw CurveError(msg);
  }
  return out;
}

namespace {

// Coefficients in s of p(origin + scale * s).
std::vector<double> shifted(const Polynomial& p, double origin, double scale) {
  std::vector<double> out;
  for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
    std::vector<double> next(out.size() + 1, 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
      next[k] += out[k] * origin;
      next[k + 1] += out[k] * scale;
    }
    next[0] += *it;
    out = std::move(next);
  }
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

}  // namespace

PatchBlend build_coons_blend(CellIndex cell, const Rect& rect, const BoundaryCurve& left,
                             const BoundaryCurve& right, const BoundaryCurve& bottom,
                             const BoundaryCurve& top) {
  const Point2 mid = rect.center();
  const Polynomial& pl = left.piece(left.piece_index(mid.y));
  const Polynomial& pr = right.piece(right.piece_index(mid.y));
  const Polynomial& pb = bottom.piece(bottom.piece_index(mid.x));
  const Polynomial& pt = top.piece(top.piece_index(mid.x));

  const double c00 = pl(rect.y0);
  const double c01 = pl(rect.y1);
  const double c10 = pr(rect.y0);
  const double c11 = pr(rect.y1);
  const struct {
    const char* corner;
    double along_x;
    double along_y;
  } corners[] = {{"lower-left", pb(rect.x0), c00},
                 {"lower-right", pb(rect.x1), c10},
                 {"upper-left", pt(rect.x0), c01},
                 {"upper-right", pt(rect.x1), c11}};
  for (const auto& c : corners) {
    if (!(std::abs(c.along_x - c.along_y) <= kCornerTolerance)) {
      std::ostringstream msg;
      msg << "cell " << cell_name(cell) << ": boundary curves disagree at the " << c.corner
          << " corner (" << c.along_x << " vs " << c.along_y << ")";
      throw CompatibilityError(msg.str());
    }
  }

  // Expanded in the cell coordinates u, v in [0, 1], where identical curve and
  // corner terms cancel exactly (constant data gives a constant patch).
  const std::vector<double> l = shifted(pl, rect.y0, rect.height());
  const std::vector<double> r = shifted(pr, rect.y0, rect.height());
  const std::vector<double> b = shifted(pb, rect.x0, rect.width());
  const std::vector<double> t = shifted(pt, rect.x0, rect.width());
  const std::size_t nu = std::max<std::size_t>(2, std::max(b.size(), t.size()));
  const std::size_t nv = std::max<std::size_t>(2, std::max(l.size(), r.size()));
  std::vector<std::vector<double>> a(nu, std::vector<double>(nv, 0.0));  // a[p][q] u^p v^q
  for (std::size_t q = 0; q < l.size(); ++q) {
    a[0][q] += l[q];
    a[1][q] -= l[q];
  }
  for (std::size_t q = 0; q < r.size(); ++q) a[1][q] += r[q];
  for (std::size_t p = 0; p < b.size(); ++p) {
    a[p][0] += b[p];
    a[p][1] -= b[p];
  }
  for (std::size_t p = 0; p < t.size(); ++p) a[p][1] += t[p];
  a[0][0] -= c00;
  a[1][0] -= c10 - c00;
  a[0][1] -= c01 - c00;
  a[1][1] -= c00 - c10 - c01 + c11;

  const Expr u = (Expr::variable(Var::x) - Expr(rect.x0)) / Expr(rect.width());
  const Expr v = (Expr::variable(Var::y) - Expr(rect.y0)) / Expr(rect.height());
  Expr sum(a[0][0]);
  for (std::size_t p = 0; p < nu; ++p) {
    for (std::size_t q = 0; q < nv; ++q) {
      if ((p == 0 && q == 0) || a[p][q] == 0.0) continue;
      Expr term(a[p][q]);
      if (p > 0) term = term * (p == 1 ? u : pow(u, static_cast<double>(p)));
      if (q > 0) term = term * (q == 1 ? v : pow(v, static_cast<double>(q)));
      sum = sum + term;
    }
  }

  PatchBlend h;
  h.cell_ = cell;
  h.rect_ = rect;
  h.form_ = BlendForm::coons;
  h.expr_ = sum;
  h.gradient_ = gradient_bound(h.expr_, rect);
  return h;
}

PatchBlend build_coons_blend(const DataGrid& grid, const BoundaryCurves& curves, CellIndex cell) {
  return build_coons_blend(cell, grid.cell_rect(cell), curves.q[static_cast<std::size_t>(cell.i - 1)],
                           curves.q[static_cast<std::size_t>(cell.i)],
                           curves.r[static_cast<std::size_t>(cell.j - 1)],
                           curves.r[static_cast<std::size_t>(cell.j)]);
}

EdgeCheck check_blend_edges(const PatchBlend& blend, const BoundaryCurves& curves, int samples) {
  const Rect& r = blend.rect();
  const CellIndex c = blend.cell();
  const Point2 mid = r.center();
  const BoundaryCurve& left = curves.q[static_cast<std::size_t>(c.i - 1)];
  const BoundaryCurve& right = curves.q[static_cast<std::size_t>(c.i)];
  const BoundaryCurve& bottom = curves.r[static_cast<std::size_t>(c.j - 1)];
  const BoundaryCurve& top = curves.r[static_cast<std::size_t>(c.j)];
  const Polynomial& pl = left.piece(left.piece_index(mid.y));
  const Polynomial& pr = right.piece(right.piece_index(mid.y));
  const Polynomial& pb = bottom.piece(bottom.piece_index(mid.x));
  const Polynomial& pt = top.piece(top.piece_index(mid.x));

  EdgeCheck out;
  auto probe = [&](Point2 p, double expected, const BoundaryCurve& curve) {
    const double err = std::abs(blend(p) - expected);
    if (!(err <= out.max_error)) {
      out.max_error = err;
      out.worst = p;
      out.edge = curve.name();
    }
  };
  for (int k = 0; k <= samples; ++k) {
    const double ty = k == samples ? r.y1 : r.y0 + r.height() * k / samples;
    const double tx = k == samples ? r.x1 : r.x0 + r.width() * k / samples;
    probe({r.x0, ty}, pl(ty), left);
    probe({r.x1, ty}, pr(ty), right);
    probe({tx, r.y0}, pb(tx), bottom);
    probe({tx, r.y1}, pt(tx), top);
  }
  return out;
}

PatchBlend load_explicit_blend(CellIndex cell, const Rect& rect, std::vector<MonomialTerm> terms,
                               const BoundaryCurves& curves, int samples, double tolerance) {
  const Expr x = Expr::variable(Var::x);
  const Expr y = Expr::variable(Var::y);
  Expr sum(0.0);
  for (const MonomialTerm& t : terms) {
    if (t.x_power < 0 || t.y_power < 0) {
      throw std::invalid_argument("blend " + cell_name(cell) + ": negative monomial power");
    }
    sum = sum + Expr(t.coefficient) * pow(x, t.x_power) * pow(y, t.y_power);
  }
  PatchBlend h;
  h.cell_ = cell;
  h.rect_ = rect;
  h.form_ = BlendForm::explicit_polynomial;
  h.expr_ = sum;
  h.terms_ = std::move(terms);

  const EdgeCheck check = check_blend_edges(h, curves, samples);
  if (!(check.max_error <= tolerance)) {
    std::ostringstream msg;
    msg << "blend " << cell_name(cell) << " does not match boundary curve " << check.edge
        << ": error " << check.max_error << " at (" << check.worst.x << ", " << check.worst.y << ")";
    throw BlendValidationError(msg.str(), check.worst, check.max_error);
  }
  h.gradient_ = gradient_bound(h.expr_, rect);
  return h;
}

FreeField make_free_field(const std::string& source, const Rect& domain,
                          std::optional<double> lipschitz_override) {
  FreeField g;
  g.source = source;
  g.expr = parse_expression(source);
  if (g.expr.depends_on(Var::t)) {
    throw std::invalid_argument("free field '" + source + "' may only use x and y");
  }
  g.range = range_bound(g.expr, domain);
  if (lipschitz_override) {
    g.gradient = {*lipschitz_override, *lipschitz_override};
  } else {
    g.gradient = gradient_bound(g.expr, domain);
  }
  if (!std::isfinite(g.gradient.taxicab()) || !g.range.is_finite()) {
    throw std::invalid_argument("free field '" + source +
                                "' has no finite Lipschitz or range bound on the domain");
  }
  return g;
}

QField::QField(const DomainMap& map, const ScalingField& s, const FreeField& g, const PatchBlend& h)
    : map_(map), s_(s), g_(g), h_(h) {
  const double ax = map.x_map.contraction();
  const double ay = map.y_map.contraction();
  const double g_max = g.range.mag();
  const double s_max = s.sup_abs();
  gradient_.dx = ax * s.gradient().dx * g_max + s_max * g.gradient.dx + ax * h.gradient().dx;
  gradient_.dy = ay * s.gradient().dy * g_max + s_max * g.gradient.dy + ay * h.gradient().dy;
}

double QField::operator()(Point2 p) const {
  const Point2 lp = map_(p);
  return -s_(lp) * g_(p) + h_(lp);
}

QField build_Q(const DomainMap& map, const ScalingField& s, const FreeField& g,
               const PatchBlend& h) {
  return QField(map, s, g, h);
}

}  // namespace fractsurf
