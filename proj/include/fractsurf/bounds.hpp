#pragma once

#include <algorithm>

#include "fractsurf/expression.hpp"
#include "fractsurf/geometry.hpp"

namespace fractsurf {

// Per-axis bounds on |df/dx| and |df/dy| over a rectangle.
//
// Lipschitz constants throughout the library are taken with respect to the
// taxicab distance |dx| + |dy|, which is the planar part of the IFS metric; for
// that distance the constant is max(dx, dy).
struct GradientBound {
  double dx = 0.0;
  double dy = 0.0;

  double taxicab() const { return std::max(dx, dy); }
};

/// Enclosure of f over r, from interval evaluation on a subdivisions^2 tiling.
Interval range_bound(const Expr& f, const Rect& r, int subdivisions = 32);

/// Sound gradient bound from interval evaluation of the symbolic partials.
GradientBound gradient_bound(const Expr& f, const Rect& r, int subdivisions = 32);

}  // namespace fractsurf
