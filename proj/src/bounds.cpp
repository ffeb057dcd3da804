#include "fractsurf/bounds.hpp"

#include <cmath>

namespace fractsurf {

namespace {

template <typename Fn>
void for_each_tile(const Rect& r, int subdivisions, Fn&& fn) {
  const double hx = r.width() / subdivisions;
  const double hy = r.height() / subdivisions;
  for (int a = 0; a < subdivisions; ++a) {
    const double xl = r.x0 + a * hx;
    const double xh = a + 1 == subdivisions ? r.x1 : xl + hx;
    for (int b = 0; b < subdivisions; ++b) {
      const double yl = r.y0 + b * hy;
      const double yh = b + 1 == subdivisions ? r.y1 : yl + hy;
      fn(Box{Interval{xl, xh}, Interval{yl, yh}});
    }
  }
}

}  // namespace

Interval range_bound(const Expr& f, const Rect& r, int subdivisions) {
  if (auto c = f.constant_value()) return Interval(*c);
  bool first = true;
  Interval out;
  for_each_tile(r, subdivisions, [&](const Box& box) {
    Interval v = f.range(box);
    if (std::isnan(v.lo) || std::isnan(v.hi)) v = Interval::entire();
    out = first ? v : out.hull(v);
    first = false;
  });
  return out;
}

GradientBound gradient_bound(const Expr& f, const Rect& r, int subdivisions) {
  const Expr fx = f.derivative(Var::x);
  const Expr fy = f.derivative(Var::y);
  return {range_bound(fx, r, subdivisions).mag(), range_bound(fy, r, subdivisions).mag()};
}

}  // namespace fractsurf
