#include "fractsurf/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fractsurf/errors.hpp"

namespace fractsurf {

namespace {

void check_knots(const std::vector<double>& knots, const char* axis) {
  if (knots.size() < 2) {
    throw InvalidGrid(std::string(axis) + " knots: need at least 2, got " +
                      std::to_string(knots.size()));
  }
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (!std::isfinite(knots[k])) {
      throw InvalidGrid(std::string(axis) + " knots: non-finite value at index " + std::to_string(k));
    }
    if (k > 0 && !(knots[k] > knots[k - 1])) {
      std::ostringstream msg;
      msg << axis << " knots: not strictly increasing at index " << k << " (" << knots[k - 1]
          << " >= " << knots[k] << ")";
      throw InvalidGrid(msg.str());
    }
  }
}

AxisMap make_axis_map(double lo, double hi, double cell_lo, double cell_hi, int orientation) {
  AxisMap map;
  map.orientation = orientation;
  const double ratio = (cell_hi - cell_lo) / (hi - lo);
  if (orientation >= 0) {
    map.scale = ratio;
    map.offset = cell_lo - ratio * lo;
  } else {
    map.scale = -ratio;
    map.offset = cell_hi + ratio * lo;
  }
  return map;
}

int locate_axis(std::span<const double> knots, double v) {
  // First knot >= v; index 0 (v == x_0) belongs to interval 1.
  const auto it = std::lower_bound(knots.begin() + 1, knots.end(), v);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - knots.begin(),
                                                   static_cast<std::ptrdiff_t>(knots.size()) - 1));
}

}  // namespace

DataGrid::DataGrid(std::vector<double> x, std::vector<double> y, std::vector<double> z)
    : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
  check_knots(x_, "x");
  check_knots(y_, "y");
  const std::size_t expected = x_.size() * y_.size();
  if (z_.size() != expected) {
    throw InvalidGrid("z: expected " + std::to_string(x_.size()) + "x" +
                      std::to_string(y_.size()) + " values, got " + std::to_string(z_.size()));
  }
  for (double v : z_) {
    if (!std::isfinite(v)) throw InvalidGrid("z: non-finite value");
  }
}

DataGrid DataGrid::from_rows(std::vector<double> x, std::vector<double> y,
                             const std::vector<std::vector<double>>& rows) {
  if (rows.size() != y.size()) {
    throw InvalidGrid("z: expected " + std::to_string(y.size()) + " rows, got " +
                      std::to_string(rows.size()));
  }
  std::vector<double> z(x.size() * y.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != x.size()) {
      throw InvalidGrid("z: row " + std::to_string(j) + " has " + std::to_string(rows[j].size()) +
                        " values, expected " + std::to_string(x.size()));
    }
    for (std::size_t i = 0; i < x.size(); ++i) z[i * y.size() + j] = rows[j][i];
  }
  return DataGrid(std::move(x), std::move(y), std::move(z));
}

std::vector<CellIndex> DataGrid::cells() const {
  std::vector<CellIndex> out;
  out.reserve(static_cast<std::size_t>(cell_count()));
  for (int i = 1; i <= n(); ++i) {
    for (int j = 1; j <= m(); ++j) out.push_back({i, j});
  }
  return out;
}

double DomainMap::contraction() const {
  return std::max(x_map.contraction(), y_map.contraction());
}

double geometric_tolerance(const Rect& domain) {
  const double extent = std::max({1.0, std::abs(domain.x0), std::abs(domain.x1),
                                  std::abs(domain.y0), std::abs(domain.y1)});
  return 1e-12 * extent;
}

std::vector<DomainMap> build_domain_maps(const DataGrid& grid,
                                         std::span<const Orientation> orientations) {
  if (!orientations.empty() &&
      orientations.size() != static_cast<std::size_t>(grid.cell_count())) {
    throw InvalidGrid("orientations: expected one entry per cell (" +
                      std::to_string(grid.cell_count()) + "), got " +
                      std::to_string(orientations.size()));
  }
  if (grid.n() < 2 || grid.m() < 2) {
    throw InvalidGrid("a single interval along an axis maps that axis onto itself with factor 1; "
                      "the domain maps are not contractions (need n >= 2 and m >= 2, got n=" +
                      std::to_string(grid.n()) + ", m=" + std::to_string(grid.m()) + ")");
  }
  const Rect e = grid.domain();
  std::vector<DomainMap> maps;
  maps.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (const CellIndex c : grid.cells()) {
    const Rect cell = grid.cell_rect(c);
    if (!(cell.width() > 0.0) || !(cell.height() > 0.0)) {
      throw InvalidGrid("degenerate cell (" + std::to_string(c.i) + "," + std::to_string(c.j) + ")");
    }
    const Orientation o = orientations.empty() ? Orientation{}
                                               : orientations[static_cast<std::size_t>(grid.cell_offset(c))];
    DomainMap map;
    map.cell = c;
    map.image = cell;
    map.x_map = make_axis_map(e.x0, e.x1, cell.x0, cell.x1, o.x);
    map.y_map = make_axis_map(e.y0, e.y1, cell.y0, cell.y1, o.y);
    if (!(map.contraction() < 1.0)) {
      throw InvalidGrid("cell (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                        ") map is not a contraction");
    }
    maps.push_back(map);
  }
  return maps;
}

CellIndex locate_cell(const DataGrid& grid, Point2 p) {
  const Rect e = grid.domain();
  if (!e.contains(p, geometric_tolerance(e))) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") outside domain [" << e.x0 << ", " << e.x1
        << "] x [" << e.y0 << ", " << e.y1 << "]";
    throw OutOfDomain(msg.str());
  }
  return {locate_axis(grid.x_knots(), p.x), locate_axis(grid.y_knots(), p.y)};
}

Point2 invert_map(const DomainMap& map, Point2 p) {
  if (!map.image.contains(p, geometric_tolerance(map.image))) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") outside cell (" << map.cell.i << ","
        << map.cell.j << ")";
    throw OutOfDomain(msg.str());
  }
  return {map.x_map.inverse(p.x), map.y_map.inverse(p.y)};
}

}  // namespace fractsurf
