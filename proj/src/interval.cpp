#include "fractsurf/interval.hpp"

#include <numbers>

namespace fractsurf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// True if some point phase + 2*pi*k lies in [lo, hi].
bool hits_phase(double lo, double hi, double phase) {
  const double k = std::ceil((lo - phase) / kTwoPi);
  return phase + k * kTwoPi <= hi;
}

}  // namespace

Interval sin(const Interval& a) {
  if (!a.is_finite() || a.width() >= kTwoPi) return {-1.0, 1.0};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  if (hits_phase(a.lo, a.hi, std::numbers::pi / 2)) hi = 1.0;
  if (hits_phase(a.lo, a.hi, -std::numbers::pi / 2)) lo = -1.0;
  return {lo, hi};
}

Interval cos(const Interval& a) {
  if (!a.is_finite() || a.width() >= kTwoPi) return {-1.0, 1.0};
  double lo = std::min(std::cos(a.lo), std::cos(a.hi));
  double hi = std::max(std::cos(a.lo), std::cos(a.hi));
  if (hits_phase(a.lo, a.hi, 0.0)) hi = 1.0;
  if (hits_phase(a.lo, a.hi, std::numbers::pi)) lo = -1.0;
  return {lo, hi};
}

Interval exp(const Interval& a) { return {std::exp(a.lo), std::exp(a.hi)}; }

Interval log(const Interval& a) {
  if (a.lo <= 0.0) return Interval::entire();
  return {std::log(a.lo), std::log(a.hi)};
}

Interval sqrt(const Interval& a) {
  if (a.lo < 0.0) return Interval::entire();
  return {std::sqrt(a.lo), std::sqrt(a.hi)};
}

Interval abs(const Interval& a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return -a;
  return {0.0, std::max(-a.lo, a.hi)};
}

Interval tanh(const Interval& a) { return {std::tanh(a.lo), std::tanh(a.hi)}; }
Interval atan(const Interval& a) { return {std::atan(a.lo), std::atan(a.hi)}; }
Interval sinh(const Interval& a) { return {std::sinh(a.lo), std::sinh(a.hi)}; }

Interval cosh(const Interval& a) {
  const Interval m = abs(a);
  return {std::cosh(m.lo), std::cosh(m.hi)};
}

Interval sign(const Interval& a) {
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  return {sgn(a.lo), sgn(a.hi)};
}

Interval pow(const Interval& a, double p) {
  if (p == 0.0) return {1.0, 1.0};
  if (p == std::round(p)) {
    const auto k = static_cast<long>(p);
    if (k < 0) return Interval{1.0} / pow(a, -p);
    if (k % 2 == 1) return {std::pow(a.lo, p), std::pow(a.hi, p)};
    const Interval m = abs(a);
    return {std::pow(m.lo, p), std::pow(m.hi, p)};
  }
  if (a.lo < 0.0) return Interval::entire();
  if (p < 0.0) return Interval{1.0} / pow(a, -p);
  return {std::pow(a.lo, p), std::pow(a.hi, p)};
}

Interval abspow(const Interval& a, double p) {
  const Interval m = abs(a);
  if (p >= 0.0) return {std::pow(m.lo, p), std::pow(m.hi, p)};
  if (m.lo == 0.0) return Interval::entire();
  return {std::pow(m.hi, p), std::pow(m.lo, p)};
}

}  // namespace fractsurf
