#pragma once

#include <algorithm>

namespace fractsurf {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Closed axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Point2 center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }

  bool contains(Point2 p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }

  Rect shrunk(double eps) const { return {x0 + eps, x1 - eps, y0 + eps, y1 - eps}; }

  Point2 clamp(Point2 p) const { return {std::clamp(p.x, x0, x1), std::clamp(p.y, y0, y1)}; }
};

}  // namespace fractsurf
