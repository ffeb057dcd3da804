#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fractsurf/errors.hpp"
#include "fractsurf/grid_model.hpp"

using namespace fractsurf;

namespace {

DataGrid table_grid() {
  return DataGrid::from_rows({0, 0.25, 0.5, 0.75, 1}, {0, 1.0 / 3.0, 2.0 / 3.0, 1},
                             {{0.3, 1.1, 0.2, 1.5, 2},
                              {0.3, 2, 1.8, 1.5, 2},
                              {3, 2, 3, 3.3, 3},
                              {2, 3, 2.5, 4, 4.5}});
}

}  // namespace

TEST_CASE("grid shape and indexing") {
  const DataGrid g = table_grid();
  CHECK(g.n() == 4);
  CHECK(g.m() == 3);
  CHECK(g.cell_count() == 12);
  CHECK(g.z(0, 0) == 0.3);
  CHECK(g.z(3, 2) == 3.3);
  CHECK(g.z(4, 3) == 4.5);
  CHECK(g.z(1, 0) == 1.1);
  CHECK(g.cells().size() == 12);
  for (int k = 0; k < g.cell_count(); ++k) CHECK(g.cell_offset(g.cell_at(k)) == k);
  const Rect r = g.cell_rect({2, 3});
  CHECK(r.x0 == 0.25);
  CHECK(r.x1 == 0.5);
  CHECK(r.y0 == doctest::Approx(2.0 / 3.0));
  CHECK(r.y1 == 1.0);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(DataGrid({0, 1, 1}, {0, 1}, std::vector<double>(6, 0.0)), InvalidGrid);
  CHECK_THROWS_AS(DataGrid({0, 2, 1}, {0, 1}, std::vector<double>(6, 0.0)), InvalidGrid);
  CHECK_THROWS_AS(DataGrid({0, 1}, {0, 1}, std::vector<double>(3, 0.0)), InvalidGrid);
  CHECK_THROWS_AS(DataGrid({0}, {0, 1}, std::vector<double>(2, 0.0)), InvalidGrid);
  CHECK_THROWS_AS(DataGrid({0, 1, 2}, {0, 1}, {0, 0, 0, 0, std::nan(""), 0}), InvalidGrid);
  CHECK_THROWS_AS(DataGrid::from_rows({0, 1}, {0, 1}, {{0, 0}}), InvalidGrid);
}

TEST_CASE("domain maps send E onto each cell") {
  const DataGrid g = table_grid();
  const auto maps = build_domain_maps(g);
  REQUIRE(maps.size() == 12);
  for (const DomainMap& m : maps) {
    const Rect r = g.cell_rect(m.cell);
    const Point2 lo = m({0, 0});
    const Point2 hi = m({1, 1});
    CHECK(lo.x == doctest::Approx(r.x0));
    CHECK(lo.y == doctest::Approx(r.y0));
    CHECK(hi.x == doctest::Approx(r.x1));
    CHECK(hi.y == doctest::Approx(r.y1));
    CHECK(m.contraction() == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("reversed orientation swaps the endpoints") {
  const DataGrid g = table_grid();
  std::vector<Orientation> o(12);
  o[static_cast<std::size_t>(g.cell_offset({2, 2}))] = {-1, -1};
  const auto maps = build_domain_maps(g, o);
  const DomainMap& m = maps[static_cast<std::size_t>(g.cell_offset({2, 2}))];
  const Point2 p = m({0, 0});
  CHECK(p.x == doctest::Approx(0.5));
  CHECK(p.y == doctest::Approx(2.0 / 3.0));
  CHECK(m.x_map.orientation == -1);
  CHECK(m.y_map.orientation == -1);
  CHECK_THROWS(build_domain_maps(g, std::vector<Orientation>(3)));
}

TEST_CASE("a single interval on an axis is not a contraction") {
  const DataGrid g({0, 1}, {0, 0.5, 1}, std::vector<double>(6, 0.0));
  CHECK_THROWS_AS(build_domain_maps(g), InvalidGrid);
}

TEST_CASE("cell lookup resolves ties downward") {
  const DataGrid g = table_grid();
  CHECK(locate_cell(g, {0.1, 0.1}) == CellIndex{1, 1});
  CHECK(locate_cell(g, {0.25, 0.5}) == CellIndex{1, 2});
  CHECK(locate_cell(g, {0.5, 1.0 / 3.0}) == CellIndex{2, 1});
  CHECK(locate_cell(g, {0.0, 0.0}) == CellIndex{1, 1});
  CHECK(locate_cell(g, {1.0, 1.0}) == CellIndex{4, 3});
  CHECK_THROWS_AS(locate_cell(g, {1.1, 0.5}), OutOfDomain);
  CHECK_THROWS_AS(locate_cell(g, {0.5, -0.01}), OutOfDomain);
}

TEST_CASE("invert_map undoes every map") {
  const DataGrid g = table_grid();
  std::vector<Orientation> o(12);
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = {k % 2 ? -1 : 1, k % 3 ? 1 : -1};
  const auto maps = build_domain_maps(g, o);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const DomainMap& m : maps) {
    for (int k = 0; k < 50; ++k) {
      const Point2 p{u(rng), u(rng)};
      const Point2 back = invert_map(m, m(p));
      CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
      CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(invert_map(maps[0], {0.9, 0.9}), OutOfDomain);
}

TEST_CASE("worked values on the table grid") {
  const DataGrid g = table_grid();
  const auto maps = build_domain_maps(g);
  const DomainMap& l11 = maps[static_cast<std::size_t>(g.cell_offset({1, 1}))];
  const DomainMap& l21 = maps[static_cast<std::size_t>(g.cell_offset({2, 1}))];
  for (double x : {0.0, 0.3, 1.0}) {
    CHECK(l11.x_map(x) == doctest::Approx(x / 4));
    CHECK(l21.x_map(x) == doctest::Approx(x / 4 + 0.25));
  }
  CHECK(locate_cell(g, {0.3, 0.5}) == CellIndex{2, 2});
  const Point2 back = invert_map(l21, {0.375, 1.0 / 6.0});
  CHECK(back.x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("uniform bisection") {
  const DataGrid g({0, 0.5, 1}, {0, 0.5, 1}, std::vector<double>(9, 0.0));
  for (const DomainMap& m : build_domain_maps(g)) {
    CHECK(m.x_map.scale == 0.5);
    CHECK(m.y_map.scale == 0.5);
    CHECK(m.x_map.offset == 0.5 * (m.cell.i - 1));
    CHECK(m.y_map.offset == 0.5 * (m.cell.j - 1));
  }
}

TEST_CASE("maps send interiors home and invert to 1e-12") {
  const DataGrid g = table_grid();
  std::vector<Orientation> o(12);
  for (std::size_t k = 0; k < o.size(); k += 3) o[k] = {-1, 1};
  const auto maps = build_domain_maps(g, o);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(1e-6, 1 - 1e-6);
  for (const DomainMap& m : maps) {
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Point2 p{u(rng), u(rng)};
      const Point2 lp = m(p);
      CHECK(locate_cell(g, lp) == m.cell);
      const Point2 back = invert_map(m, lp);
      worst = std::max({worst, std::abs(back.x - p.x), std::abs(back.y - p.y)});
    }
    CHECK(worst < 1e-12);
    // corners go to corners
    const Rect r = m.image;
    for (const Point2 c : {Point2{0, 0}, Point2{1, 0}, Point2{0, 1}, Point2{1, 1}}) {
      const Point2 lc = m(c);
      CHECK((lc.x == doctest::Approx(r.x0) || lc.x == doctest::Approx(r.x1)));
      CHECK((lc.y == doctest::Approx(r.y0) || lc.y == doctest::Approx(r.y1)));
    }
  }
}
