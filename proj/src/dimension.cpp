#include "fractsurf/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "fractsurf/errors.hpp"

namespace fractsurf {

namespace {

constexpr double kCollinearTolerance = 1e-10;

bool uniform_axis(std::span<const double> knots) {
  const double lo = knots.front();
  const double step = (knots.back() - lo) / static_cast<double>(knots.size() - 1);
  const double scale = std::max({1.0, std::abs(lo), std::abs(knots.back())});
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (std::abs(knots[k] - (lo + step * static_cast<double>(k))) > 1e-12 * scale) return false;
  }
  return true;
}

// Largest distance of (t_k, z_k) from the chord through the end points.
double chord_deviation(std::span<const double> t, const std::vector<double>& z) {
  const double dt = t.back() - t.front();
  const double dz = z.back() - z.front();
  const double len = std::hypot(dt, dz);
  double worst = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double cross = dt * (z[k] - z.front()) - dz * (t[k] - t.front());
    worst = std::max(worst, std::abs(cross) / len);
  }
  return worst;
}

double log_base(double value, double base) { return std::log(value) / std::log(base); }

std::pair<int, int> node_range(double lo, double hi, double origin, double spacing) {
  const int first = static_cast<int>(std::ceil((lo - origin) / spacing - 1e-9));
  const int last = static_cast<int>(std::floor((hi - origin) / spacing + 1e-9));
  return {first, last};
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool degenerate = false;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  LineFit fit;
  if (syy == 0.0 || sxx == 0.0) {
    fit.degenerate = true;
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss_res += r * r;
  }
  fit.r_squared = 1.0 - ss_res / syy;
  return fit;
}

}  // namespace

std::string Applicability::reason() const {
  if (applicable()) return "hypotheses hold";
  std::vector<std::string> why;
  if (!square) why.push_back("grid is not square (n != m)");
  if (!uniform) why.push_back("knots are not uniformly spaced");
  if (!noncollinear_column && !noncollinear_row) why.push_back("every interior data line is collinear");
  std::string out;
  for (std::size_t k = 0; k < why.size(); ++k) out += (k ? "; " : "") + why[k];
  return out;
}

Applicability check_hypotheses(const DataGrid& grid) {
  Applicability out;
  out.square = grid.n() == grid.m();
  out.uniform = uniform_axis(grid.x_knots()) && uniform_axis(grid.y_knots());
  for (int alpha = 1; alpha < grid.n() && !out.noncollinear_column; ++alpha) {
    std::vector<double> z;
    for (int l = 0; l <= grid.m(); ++l) z.push_back(grid.z(alpha, l));
    if (chord_deviation(grid.y_knots(), z) > kCollinearTolerance) out.noncollinear_column = alpha;
  }
  for (int beta = 1; beta < grid.m() && !out.noncollinear_row; ++beta) {
    std::vector<double> z;
    for (int k = 0; k <= grid.n(); ++k) z.push_back(grid.z(k, beta));
    if (chord_deviation(grid.x_knots(), z) > kCollinearTolerance) out.noncollinear_row = beta;
  }
  return out;
}

const char* to_string(BoundsCase c) {
  switch (c) {
    case BoundsCase::bounds: return "bounds";
    case BoundsCase::exactly_two: return "exactly-two";
    case BoundsCase::inapplicable: return "inapplicable";
  }
  return "?";
}

TheoreticalBounds theoretical_bounds(std::span<const double> s_bar,
                                     std::span<const double> s_underbar, int n) {
  TheoreticalBounds out;
  const auto cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (n < 2 || s_bar.size() != cells || s_underbar.size() != cells) {
    out.note = "extrema do not form an n x n table with n >= 2";
    return out;
  }
  for (std::size_t k = 0; k < cells; ++k) {
    out.sum_bar += s_bar[k];
    out.sum_underbar += s_underbar[k];
  }
  const double nd = static_cast<double>(n);
  if (out.sum_bar <= nd) {
    out.kind = BoundsCase::exactly_two;
    out.lower = out.upper = 2.0;
    out.note = "sum of s_bar <= n: dimension is 2";
    return out;
  }
  out.kind = BoundsCase::bounds;
  out.upper = std::min(3.0, 1.0 + log_base(out.sum_bar, nd));
  if (out.sum_underbar > nd) {
    out.lower = std::max(2.0, 1.0 + log_base(out.sum_underbar, nd));
    out.note = "sum of s_underbar > n: two-sided bound";
  } else {
    out.gap_case = true;
    out.lower = 2.0;
    out.note = "sum of s_underbar <= n < sum of s_bar: no lower statement available; "
               "lower bound clamped to 2";
  }
  return out;
}

std::vector<double> natural_scales(int subdivision, double extent, int levels) {
  std::vector<double> out;
  double delta = extent;
  for (int k = 1; k <= levels; ++k) {
    delta /= subdivision;
    out.push_back(delta);
  }
  return out;
}

CountsTable box_count(const HeightField& field, std::span<const double> deltas) {
  const Rect& d = field.domain();
  const int r = field.resolution();
  const double hx = d.width() / (r - 1);
  const double hy = d.height() / (r - 1);
  CountsTable out;
  for (double delta : deltas) {
    if (delta < 4.0 * hx * (1 - 1e-9) || delta < 4.0 * hy * (1 - 1e-9)) {
      std::ostringstream msg;
      msg << "box size " << delta << " is finer than resolution " << r
          << " supports (need at least 4 node spacings per box)";
      throw ConfigurationError(msg.str());
    }
    const int cols = static_cast<int>(std::ceil(d.width() / delta - 1e-9));
    const int rows = static_cast<int>(std::ceil(d.height() / delta - 1e-9));
    double total = 0.0;
    for (int a = 0; a < cols; ++a) {
      const auto [a_lo, a_hi] =
          node_range(d.x0 + a * delta, std::min(d.x1, d.x0 + (a + 1) * delta), d.x0, hx);
      for (int b = 0; b < rows; ++b) {
        const auto [b_lo, b_hi] =
            node_range(d.y0 + b * delta, std::min(d.y1, d.y0 + (b + 1) * delta), d.y0, hy);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int jb = std::max(0, b_lo); jb <= std::min(r - 1, b_hi); ++jb) {
          for (int ia = std::max(0, a_lo); ia <= std::min(r - 1, a_hi); ++ia) {
            const double v = field.at(ia, jb);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        }
        total += std::ceil((hi - lo) / delta) + 1.0;
      }
    }
    out.push_back({delta, total});
  }
  return out;
}

CountsTable box_count_points(std::span<const Point3> points, const Rect& domain,
                             std::span<const double> deltas) {
  CountsTable out;
  if (points.empty()) return out;
  double z_lo = points.front().z;
  for (const Point3& p : points) z_lo = std::min(z_lo, p.z);
  std::vector<std::uint64_t> keys(points.size());
  for (double delta : deltas) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto ix = static_cast<std::uint64_t>(std::floor((points[k].x - domain.x0) / delta));
      const auto iy = static_cast<std::uint64_t>(std::floor((points[k].y - domain.y0) / delta));
      const auto iz = static_cast<std::uint64_t>(std::floor((points[k].z - z_lo) / delta));
      keys[k] = (ix << 42) | (iy << 21) | iz;
    }
    std::sort(keys.begin(), keys.end());
    const auto distinct = std::unique(keys.begin(), keys.end()) - keys.begin();
    out.push_back({delta, static_cast<double>(distinct)});
  }
  return out;
}

DimensionFit estimate_dimension(const CountsTable& counts) {
  if (counts.size() < 3) {
    throw std::invalid_argument("estimate_dimension: need at least 3 scales, got " +
                                std::to_string(counts.size()));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const CountRow& row : counts) {
    xs.push_back(std::log(1.0 / row.delta));
    ys.push_back(std::log(row.count));
  }
  auto residuals_of = [&](const LineFit& f) {
    std::vector<double> r;
    for (std::size_t k = 0; k < xs.size(); ++k) r.push_back(ys[k] - (f.intercept + f.slope * xs[k]));
    return r;
  };

  DimensionFit out;
  LineFit fit = least_squares(xs, ys);
  out.scales_used = static_cast<int>(xs.size());
  if (fit.degenerate) {
    out.degenerate = true;
    out.intercept = fit.intercept;
    out.residuals = residuals_of(fit);
    out.warning = "counts are constant across scales; slope reported as 0";
    return out;
  }

  std::vector<double> residuals = residuals_of(fit);
  if (xs.size() >= 4) {
    const std::size_t coarsest = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end(),
                         [](const CountRow& a, const CountRow& b) { return a.delta < b.delta; }) -
        counts.begin());
    std::vector<double> mags;
    for (double r : residuals) mags.push_back(std::abs(r));
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2), mags.end());
    const double median = mags[mags.size() / 2];
    const double worst = std::abs(residuals[coarsest]);
    if (worst > 3.0 * median && worst > 1e-9) {
      std::vector<double> xr;
      std::vector<double> yr;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k == coarsest) continue;
        xr.push_back(xs[k]);
        yr.push_back(ys[k]);
      }
      const LineFit refit = least_squares(xr, yr);
      if (!refit.degenerate) {
        fit = refit;
        out.coarsest_excluded = true;
        out.scales_used = static_cast<int>(xr.size());
        residuals = residuals_of(fit);
      }
    }
  }
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  out.residuals = std::move(residuals);
  return out;
}

DimensionReport analyse_dimension(const IfsSystem& system, const SurfaceSample& sample,
                                  const DimensionOptions& options) {
  const DataGrid& grid = system.grid();
  DimensionReport report;
  report.applicability = check_hypotheses(grid);
  report.epsilon_fraction = options.epsilon_fraction;

  for (const CellMaps& cm : system.cells()) {
    const Rect& r = cm.s.rect();
    const double eps = options.epsilon_fraction * std::min(r.width(), r.height());
    const InteriorExtrema ex = interior_extrema(cm.s, eps);
    report.epsilon.push_back(eps);
    report.s_bar.push_back(ex.s_bar);
    report.s_underbar.push_back(ex.s_underbar);
  }
  if (report.applicability.applicable()) {
    report.bounds = theoretical_bounds(report.s_bar, report.s_underbar, grid.n());
  } else {
    report.bounds.note = report.applicability.reason();
    report.annotation = "no theoretical band: " + report.applicability.reason();
  }

  const Rect e = grid.domain();
  const int subdivision = grid.n();
  int levels = options.levels;
  if (levels <= 0) {
    // Finest level whose boxes still span 8 node spacings on both axes. The
    // hard minimum is 4, but column ranges read off that few nodes undercount.
    const double spacing = std::max(e.width(), e.height()) / (sample.heights.resolution() - 1);
    double delta = e.width();
    while (delta / subdivision >= 8.0 * spacing * (1 - 1e-9)) {
      delta /= subdivision;
      ++levels;
    }
    if (levels < 3) {
      throw ConfigurationError("resolution " + std::to_string(sample.heights.resolution()) +
                               " supports only " + std::to_string(levels) +
                               " natural scales at 8 node spacings per box; need 3");
    }
  }
  const std::vector<double> deltas = natural_scales(subdivision, e.width(), levels);
  report.counts = box_count(sample.heights, deltas);
  report.fit = estimate_dimension(report.counts);

  if (options.cross_check_points > 0) {
    const auto points = chaos_game(system, options.cross_check_points, options.seed);
    report.point_counts = box_count_points(points, e, deltas);
    report.point_fit = estimate_dimension(report.point_counts);
  }
  return report;
}

}  // namespace fractsurf
