#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fractsurf/grid_model.hpp"
#include "fractsurf/ifs_core.hpp"

namespace fractsurf {

struct Applicability {
  bool square = false;    // n == m
  bool uniform = false;   // equally spaced knots on both axes
  std::optional<int> noncollinear_column;  // interior alpha whose column is not collinear
  std::optional<int> noncollinear_row;     // interior beta whose row is not collinear
  bool applicable() const {
    return square && uniform && (noncollinear_column || noncollinear_row);
  }
  std::string reason() const;
};

/// The dimension bounds need an n x n uniform grid with at least one interior
/// data line that is not collinear. Never throws.
Applicability check_hypotheses(const DataGrid& grid);

enum class BoundsCase { bounds, exactly_two, inapplicable };
const char* to_string(BoundsCase c);

struct TheoreticalBounds {
  BoundsCase kind = BoundsCase::inapplicable;
  double lower = 2.0;
  double upper = 3.0;
  double sum_bar = 0.0;
  double sum_underbar = 0.0;
  // sum_underbar <= n < sum_bar: no statement is available, lower is clamped to 2.
  bool gap_case = false;
  std::string note;
};

/// s_bar and s_underbar hold n * n values. Returns kind = inapplicable when
/// the sizes do not match an n x n grid.
TheoreticalBounds theoretical_bounds(std::span<const double> s_bar,
                                     std::span<const double> s_underbar, int n);

struct CountRow {
  double delta = 0.0;
  double count = 0.0;
};

using CountsTable = std::vector<CountRow>;

/// delta_k = n^-k * extent for k = 1..levels.
std::vector<double> natural_scales(int subdivision, double extent, int levels);

/// Column-range box counting of a height field: each delta-column of the
/// domain mesh contributes ceil((max - min) / delta) + 1 boxes.
/// Throws ConfigurationError when a column would span fewer than 4 node
/// spacings on either axis.
CountsTable box_count(const HeightField& field, std::span<const double> deltas);

/// Occupied delta-cubes of a point set (cross-check for box_count).
CountsTable box_count_points(std::span<const Point3> points, const Rect& domain,
                             std::span<const double> deltas);

struct DimensionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;  // per row of the input table, from the final fit
  bool coarsest_excluded = false;
  int scales_used = 0;
  bool degenerate = false;
  std::string warning;
};

/// Least squares of log N(delta) against log(1/delta). Drops the coarsest
/// scale when its residual exceeds 3x the median residual.
/// Throws std::invalid_argument for fewer than 3 scales.
DimensionFit estimate_dimension(const CountsTable& counts);

struct DimensionOptions {
  double epsilon_fraction = 1.0 / 64.0;  // interior shrink, as a fraction of the cell's short side
  int levels = 0;                        // 0: down to 8 node spacings per box
  std::size_t cross_check_points = 0;    // chaos-game points for the point-count cross check
  std::uint64_t seed = 1;
};

struct DimensionReport {
  Applicability applicability;
  TheoreticalBounds bounds;
  double epsilon_fraction = 0.0;
  std::vector<double> epsilon;     // per cell, cell_offset order
  std::vector<double> s_bar;       // per cell
  std::vector<double> s_underbar;  // per cell
  CountsTable counts;
  DimensionFit fit;
  CountsTable point_counts;  // empty unless requested
  std::optional<DimensionFit> point_fit;
  std::string annotation;

  double estimate() const { return fit.slope; }
};

DimensionReport analyse_dimension(const IfsSystem& system, const SurfaceSample& sample,
                                  const DimensionOptions& options = {});

}  // namespace fractsurf
