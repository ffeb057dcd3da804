#pragma once

#include "fractsurf/bounds.hpp"
#include "fractsurf/expression.hpp"
#include "fractsurf/grid_model.hpp"

namespace fractsurf {

enum class ScalingForm {
  separable_quartic,   // c (x - x_{i-1})(x - x_i)(y - y_{j-1})(y - y_j)
  polynomial_product,  // d(psi * product of powered edge factors)
  expression,          // any boundary-vanishing expression in x, y
};

const char* to_string(ScalingForm form);

// Exponents of the four edge factors of a polynomial-product field.
struct EdgeExponents {
  double x_upper = 1.0;  // on (x - x_i)
  double x_lower = 1.0;  // on (x - x_{i-1})
  double y_upper = 1.0;  // on (y - y_j)
  double y_lower = 1.0;  // on (y - y_{j-1})

  bool operator==(const EdgeExponents&) const = default;
};

struct SamplingOptions {
  int certify_intervals = 512;   // per-axis sample intervals for magnitude certification
  int extrema_intervals = 256;   // per-axis sample intervals for interior extrema
  int boundary_samples = 1024;   // samples per edge for the boundary-zero check
  int bound_subdivisions = 32;   // tiles per axis for interval bounds
};

struct MagnitudeCertificate {
  double sup_abs = 0.0;      // certified upper bound on sup |s| over the closed cell
  double sampled_sup = 0.0;  // largest |s| seen on the sample grid
  Point2 witness;            // location of sampled_sup (the exact maximiser when analytic)
  double slack = 0.0;        // Lipschitz slack added to sampled_sup
  bool analytic = false;
};

/// A certified vertical scaling function s_ij on one cell.
///
/// Every instance vanishes on the four edges of its cell and satisfies
/// sup |s| < 1; the factories below refuse to build anything else.
class ScalingField {
 public:
  CellIndex cell() const { return cell_; }
  const Rect& rect() const { return rect_; }
  ScalingForm form() const { return form_; }
  const Expr& expr() const { return expr_; }

  double operator()(double x, double y) const { return expr_(x, y); }
  double operator()(Point2 p) const { return expr_(p.x, p.y); }

  const MagnitudeCertificate& certificate() const { return certificate_; }
  double sup_abs() const { return certificate_.sup_abs; }
  const GradientBound& gradient() const { return gradient_; }

  // Leading constant of the separable quartic form (psi for the product form
  // when psi is constant); 0 otherwise.
  double coefficient() const { return coefficient_; }

 private:
  friend ScalingField finish_field(ScalingField, const SamplingOptions&);
  friend ScalingField make_separable_quartic(CellIndex, const Rect&, double, const SamplingOptions&);
  friend ScalingField build_product_field(CellIndex, const Rect&, const Expr&, EdgeExponents,
                                           const Expr&, const SamplingOptions&);
  friend ScalingField make_expression_field(CellIndex, const Rect&, const Expr&,
                                            const SamplingOptions&);

  CellIndex cell_;
  Rect rect_;
  ScalingForm form_ = ScalingForm::expression;
  Expr expr_;
  double coefficient_ = 0.0;
  MagnitudeCertificate certificate_;
  GradientBound gradient_;
};

/// c (x - x_{i-1})(x - x_i)(y - y_{j-1})(y - y_j), the form used by all the
/// fields of the worked example. Throws MagnitudeViolation.
ScalingField make_separable_quartic(CellIndex cell, const Rect& rect, double coefficient,
                                    const SamplingOptions& options = {});

/// s = d(t) with t = psi (x - x_i)^a (x - x_{i-1})^b (y - y_j)^c (y - y_{j-1})^d.
///
/// Integer exponents use the ordinary signed power; non-integer exponents use
/// |u|^p. Exponents below 1 are rejected because the field would not be
/// Lipschitz at the edges. `outer` is an expression in t with d(0) = 0.
/// With constant psi, unit exponents and d = t this is the separable quartic.
ScalingField build_product_field(CellIndex cell, const Rect& rect, const Expr& psi,
                                  EdgeExponents exponents, const Expr& outer,
                                  const SamplingOptions& options = {});

/// Arbitrary expression; boundary vanishing is checked by sampling.
ScalingField make_expression_field(CellIndex cell, const Rect& rect, const Expr& s,
                                   const SamplingOptions& options = {});

/// Recomputes the magnitude certificate. Throws MagnitudeViolation if the
/// certified bound reaches 1.
MagnitudeCertificate certify_magnitude(const ScalingField& field,
                                       const SamplingOptions& options = {});

/// Largest |s| on an (intervals + 1)^2 node grid over the closed cell.
double sampled_sup(const ScalingField& field, int intervals, Point2* witness = nullptr);

struct InteriorExtrema {
  double s_bar = 0.0;       // max |s| over the cell shrunk by epsilon
  double s_underbar = 0.0;  // min |s| over the cell shrunk by epsilon
  double epsilon = 0.0;
  Point2 argmax;
  Point2 argmin;
  // Boundary-vanishing continuous fields have inf |s| = 0 over the open cell,
  // whatever the shrunk value says.
  double open_interior_infimum = 0.0;
};

/// Extrema of |s| over the epsilon-shrunk cell: dense sampling followed by a
/// golden-section polish around the best nodes.
/// Throws std::invalid_argument unless 0 < epsilon < half the smaller cell side.
InteriorExtrema interior_extrema(const ScalingField& field, double epsilon, int intervals = 256);

}  // namespace fractsurf
