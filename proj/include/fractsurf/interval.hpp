#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace fractsurf {

// Closed interval with outward-safe (but not directed-rounding) endpoint arithmetic.
// Good enough for bounding smooth fields over small boxes; not a rigorous enclosure
// in the interval-analysis sense.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double v) : lo(v), hi(v) {}
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  static Interval entire() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }

  bool contains(double v) const { return lo <= v && v <= hi; }
  double width() const { return hi - lo; }
  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  Interval hull(const Interval& o) const { return {std::min(lo, o.lo), std::max(hi, o.hi)}; }
};

inline Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator*(const Interval& a, const Interval& b) {
  // 0 * inf is taken as 0 so a degenerate zero factor stays exact.
  auto mul = [](double u, double v) { return (u == 0.0 || v == 0.0) ? 0.0 : u * v; };
  const double p1 = mul(a.lo, b.lo);
  const double p2 = mul(a.lo, b.hi);
  const double p3 = mul(a.hi, b.lo);
  const double p4 = mul(a.hi, b.hi);
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains(0.0)) return Interval::entire();
  return a * Interval{1.0 / b.hi, 1.0 / b.lo};
}

Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval exp(const Interval& a);
Interval log(const Interval& a);
Interval sqrt(const Interval& a);
Interval abs(const Interval& a);
Interval tanh(const Interval& a);
Interval atan(const Interval& a);
Interval sinh(const Interval& a);
Interval cosh(const Interval& a);
Interval sign(const Interval& a);
// Integer or real exponent; real exponents require a non-negative base.
Interval pow(const Interval& a, double p);
// |a|^p, the magnitude power used by non-integer product exponents.
Interval abspow(const Interval& a, double p);

}  // namespace fractsurf
