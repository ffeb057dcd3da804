#pragma once

#include <compare>
#include <span>
#include <vector>

#include "fractsurf/geometry.hpp"

namespace fractsurf {

// 1-based cell index: i in 1..n over x, j in 1..m over y.
struct CellIndex {
  int i = 1;
  int j = 1;

  auto operator<=>(const CellIndex&) const = default;
};

/// The interpolation data set: knots x_0 < ... < x_n, y_0 < ... < y_m and the
/// heights z(i, j) at (x_i, y_j).
class DataGrid {
 public:
  DataGrid() = default;

  /// z is indexed z[i * (m + 1) + j]. Throws InvalidGrid.
  DataGrid(std::vector<double> x, std::vector<double> y, std::vector<double> z);

  /// rows[j][i] holds the height at (x_i, y_j), one row per y knot.
  static DataGrid from_rows(std::vector<double> x, std::vector<double> y,
                            const std::vector<std::vector<double>>& rows);

  int n() const { return static_cast<int>(x_.size()) - 1; }
  int m() const { return static_cast<int>(y_.size()) - 1; }
  int cell_count() const { return n() * m(); }

  double x(int i) const { return x_[i]; }
  double y(int j) const { return y_[j]; }
  double z(int i, int j) const { return z_[static_cast<std::size_t>(i) * (m() + 1) + j]; }

  std::span<const double> x_knots() const { return x_; }
  std::span<const double> y_knots() const { return y_; }
  std::span<const double> z_values() const { return z_; }

  Rect domain() const { return {x_.front(), x_.back(), y_.front(), y_.back()}; }
  Rect cell_rect(CellIndex c) const { return {x_[c.i - 1], x_[c.i], y_[c.j - 1], y_[c.j]}; }

  // Row-major cell position, (i - 1) * m + (j - 1).
  int cell_offset(CellIndex c) const { return (c.i - 1) * m() + (c.j - 1); }
  CellIndex cell_at(int offset) const { return {offset / m() + 1, offset % m() + 1}; }
  std::vector<CellIndex> cells() const;

  bool operator==(const DataGrid&) const = default;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> z_;
};

// Affine contraction t -> scale * t + offset of one axis of E onto one knot interval.
struct AxisMap {
  double scale = 1.0;
  double offset = 0.0;
  int orientation = +1;  // +1: x_0 -> x_{i-1}; -1: x_0 -> x_i

  double operator()(double t) const { return scale * t + offset; }
  double inverse(double u) const { return (u - offset) / scale; }
  double contraction() const { return scale < 0 ? -scale : scale; }
};

struct Orientation {
  int x = +1;
  int y = +1;

  bool operator==(const Orientation&) const = default;
};

/// L_ij : E -> E_ij as a pair of axis maps.
struct DomainMap {
  AxisMap x_map;
  AxisMap y_map;
  CellIndex cell;
  Rect image;

  Point2 operator()(Point2 p) const { return {x_map(p.x), y_map(p.y)}; }

  // Contraction factor in the taxicab metric |dx| + |dy|.
  double contraction() const;
};

/// One map per cell, in cell_offset order. orientations may be empty
/// (order-preserving everywhere) or hold one entry per cell.
/// Throws InvalidGrid when a map would not be a contraction (n == 1 or m == 1).
std::vector<DomainMap> build_domain_maps(const DataGrid& grid,
                                         std::span<const Orientation> orientations = {});

/// Closed-cell lookup; points on shared edges go to the lower-index cell.
/// Throws OutOfDomain.
CellIndex locate_cell(const DataGrid& grid, Point2 p);

/// Closed-form L_ij^{-1}. Throws OutOfDomain if p is outside E_ij beyond 1e-12.
Point2 invert_map(const DomainMap& map, Point2 p);

// Tolerance used for "on the cell" checks, scaled to the domain size.
double geometric_tolerance(const Rect& domain);

}  // namespace fractsurf
