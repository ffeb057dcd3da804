#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fractsurf/bounds.hpp"
#include "fractsurf/expression.hpp"
#include "fractsurf/grid_model.hpp"
#include "fractsurf/scaling_fields.hpp"

namespace fractsurf {

// Polynomial in one global coordinate, coefficients in ascending powers.
struct Polynomial {
  std::vector<double> coefficients;

  double operator()(double t) const;
  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  Expr as_expr(Var v) const;

  bool operator==(const Polynomial&) const = default;
};

enum class CurveMethod { linear, quadratic, pieces };
const char* to_string(CurveMethod method);

// q_alpha lives on the line x = x_alpha (parameter y); r_beta on y = y_beta (parameter x).
enum class CurveAxis { x_line, y_line };

/// Piecewise polynomial interpolating one row or column of the data grid.
class BoundaryCurve {
 public:
  BoundaryCurve(CurveAxis axis, int index, CurveMethod method, std::vector<double> knots,
                std::vector<Polynomial> pieces);

  CurveAxis axis() const { return axis_; }
  int index() const { return index_; }
  CurveMethod method() const { return method_; }
  std::string name() const;

  // Piece k (1-based) covers [knots[k-1], knots[k]].
  const Polynomial& piece(int k) const { return pieces_[static_cast<std::size_t>(k - 1)]; }
  int piece_count() const { return static_cast<int>(pieces_.size()); }
  // 1-based index of the piece containing t (lower piece on shared knots).
  int piece_index(double t) const;

  // Evaluates the piece containing t; shared knots resolve to the lower piece.
  double operator()(double t) const;

 private:
  CurveAxis axis_;
  int index_;
  CurveMethod method_;
  std::vector<double> knots_;
  std::vector<Polynomial> pieces_;
};

struct BoundaryCurves {
  std::vector<BoundaryCurve> q;  // q_0 .. q_n
  std::vector<BoundaryCurve> r;  // r_0 .. r_m
};

// User pieces: q[alpha][j-1] is the piece of q_alpha on I_{y_j}; r[beta][i-1] on I_{x_i}.
struct CurvePieces {
  std::vector<std::vector<Polynomial>> q;
  std::vector<std::vector<Polynomial>> r;

  bool operator==(const CurvePieces&) const = default;
};

/// Builds q_0..q_n and r_0..r_m. `linear` ignores `pieces`; the other methods
/// require them and check interpolation and continuity (1e-12, relative to term size).
/// Throws CurveError naming the failing curve, piece and knot.
BoundaryCurves build_boundary_curves(const DataGrid& grid, CurveMethod method,
                                     const CurvePieces* pieces = nullptr);

enum class BlendForm { coons, explicit_polynomial };
const char* to_string(BlendForm form);

struct MonomialTerm {
  double coefficient = 0.0;
  int x_power = 0;
  int y_power = 0;

  bool operator==(const MonomialTerm&) const = default;
};

/// h_ij: a patch on E_ij whose edge restrictions are the four boundary curves.
class PatchBlend {
 public:
  CellIndex cell() const { return cell_; }
  const Rect& rect() const { return rect_; }
  BlendForm form() const { return form_; }
  const Expr& expr() const { return expr_; }
  const std::vector<MonomialTerm>& terms() const { return terms_; }
  const GradientBound& gradient() const { return gradient_; }

  double operator()(double x, double y) const { return expr_(x, y); }
  double operator()(Point2 p) const { return expr_(p.x, p.y); }

 private:
  friend PatchBlend build_coons_blend(CellIndex, const Rect&, const BoundaryCurve&,
                                      const BoundaryCurve&, const BoundaryCurve&,
                                      const BoundaryCurve&);
  friend PatchBlend load_explicit_blend(CellIndex, const Rect&, std::vector<MonomialTerm>,
                                        const BoundaryCurves&, int, double);

  CellIndex cell_;
  Rect rect_;
  BlendForm form_ = BlendForm::coons;
  Expr expr_;
  std::vector<MonomialTerm> terms_;
  GradientBound gradient_;
};

/// Bilinearly blended Coons patch over `rect` from the curves on its left
/// (x = x0), right, bottom (y = y0) and top edges.
/// Throws CompatibilityError if the curves disagree at a corner by more than 1e-9.
PatchBlend build_coons_blend(CellIndex cell, const Rect& rect, const BoundaryCurve& left,
                             const BoundaryCurve& right, const BoundaryCurve& bottom,
                             const BoundaryCurve& top);

PatchBlend build_coons_blend(const DataGrid& grid, const BoundaryCurves& curves, CellIndex cell);

struct EdgeCheck {
  double max_error = 0.0;
  Point2 worst;
  std::string edge;  // name of the curve where the worst sample sits
};

/// Compares h against q_{i-1}, q_i, r_{j-1}, r_j at `samples` + 1 points per edge.
EdgeCheck check_blend_edges(const PatchBlend& blend, const BoundaryCurves& curves, int samples);

/// Explicit monomial table in the cell's native (global) coordinates, checked
/// against the boundary curves. Throws BlendValidationError with the worst sample.
PatchBlend load_explicit_blend(CellIndex cell, const Rect& rect, std::vector<MonomialTerm> terms,
                               const BoundaryCurves& curves, int samples = 1024,
                               double tolerance = 1e-9);

/// g: any Lipschitz field on E, with its gradient bound and range over E.
struct FreeField {
  std::string source;
  Expr expr;
  GradientBound gradient;
  Interval range;

  double operator()(double x, double y) const { return expr(x, y); }
  double operator()(Point2 p) const { return expr(p.x, p.y); }
};

/// Throws std::invalid_argument if the bound is not finite.
FreeField make_free_field(const std::string& source, const Rect& domain,
                          std::optional<double> lipschitz_override = std::nullopt);

/// Q_ij(x, y) = -s_ij(L_ij(x, y)) g_ij(x, y) + h_ij(L_ij(x, y)) on E.
class QField {
 public:
  QField(const DomainMap& map, const ScalingField& s, const FreeField& g, const PatchBlend& h);

  double operator()(Point2 p) const;
  const GradientBound& gradient() const { return gradient_; }
  double lipschitz() const { return gradient_.taxicab(); }

 private:
  DomainMap map_;
  ScalingField s_;
  FreeField g_;
  PatchBlend h_;
  GradientBound gradient_;
};

/// Lipschitz bound by the product and sum rules from the component bounds.
QField build_Q(const DomainMap& map, const ScalingField& s, const FreeField& g,
               const PatchBlend& h);

}  // namespace fractsurf
