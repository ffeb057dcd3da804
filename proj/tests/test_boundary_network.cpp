#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "fractsurf/boundary_network.hpp"
#include "fractsurf/config.hpp"
#include "fractsurf/errors.hpp"

using namespace fractsurf;

namespace {

const double kZ[4][5] = {{0.3, 1.1, 0.2, 1.5, 2},
                         {0.3, 2, 1.8, 1.5, 2},
                         {3, 2, 3, 3.3, 3},
                         {2, 3, 2.5, 4, 4.5}};

struct Table {
  JobConfig cfg = load_fixture("example2a");
  DataGrid grid = resolve_grid(cfg.grid);
};

}  // namespace

TEST_CASE("polynomial evaluation and expression agree") {
  const Polynomial p{{1.0, -2.0, 3.0}};
  CHECK(p.degree() == 2);
  CHECK(p(2.0) == doctest::Approx(9.0));
  CHECK(p.as_expr(Var::y)(0.0, 2.0) == doctest::Approx(9.0));
}

TEST_CASE("table pieces interpolate the data and join continuously") {
  Table t;
  const BoundaryCurves c = build_boundary_curves(t.grid, CurveMethod::pieces, &t.cfg.pieces);
  REQUIRE(c.q.size() == 5);
  REQUIRE(c.r.size() == 4);
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; b <= 3; ++b) {
      CAPTURE(a);
      CAPTURE(b);
      CHECK(c.q[a](t.grid.y(b)) == doctest::Approx(kZ[b][a]).epsilon(1e-12));
      CHECK(c.r[b](t.grid.x(a)) == doctest::Approx(kZ[b][a]).epsilon(1e-12));
    }
  }
  CHECK(c.q[2].name() == "q_2");
  CHECK(c.r[1].name() == "r_1");
  CHECK(c.q[0].piece_index(1.0 / 3.0) == 1);
  CHECK(c.q[0].piece_index(0.5) == 2);
}

TEST_CASE("the printed sign of the last q_3 piece fails interpolation") {
  Table t;
  CurvePieces pieces = t.cfg.pieces;
  pieces.q[3][2] = Polynomial{{4.9, -5.4, -4.5}};
  try {
    build_boundary_curves(t.grid, CurveMethod::pieces, &pieces);
    FAIL("no throw");
  } catch (const CurveError& err) {
    const std::string what = err.what();
    CHECK(what.find("q_3") != std::string::npos);
    CHECK(what.find("piece 3") != std::string::npos);
  }
}

TEST_CASE("linear curves and piece checks") {
  Table t;
  const BoundaryCurves lin = build_boundary_curves(t.grid, CurveMethod::linear);
  CHECK(lin.q[1](1.0 / 6.0) == doctest::Approx((1.1 + 2.0) / 2));
  CHECK(lin.r[3](0.625) == doctest::Approx((2.5 + 4.0) / 2));
  CHECK_THROWS_AS(build_boundary_curves(t.grid, CurveMethod::pieces), CurveError);
  CurvePieces cubic = t.cfg.pieces;
  cubic.q[0][0].coefficients.push_back(1.0);
  CHECK_THROWS_AS(build_boundary_curves(t.grid, CurveMethod::quadratic, &cubic), CurveError);
  CurvePieces short_ = t.cfg.pieces;
  short_.r[2].pop_back();
  CHECK_THROWS_AS(build_boundary_curves(t.grid, CurveMethod::pieces, &short_), CurveError);
}

TEST_CASE("explicit blend tables match their edges except cell (4,1)") {
  Table t;
  const BoundaryCurves c = build_boundary_curves(t.grid, CurveMethod::pieces, &t.cfg.pieces);
  for (const auto& [cell, terms] : t.cfg.blend.tables) {
    CAPTURE(cell.i);
    CAPTURE(cell.j);
    if (cell == CellIndex{4, 1}) {
      try {
        load_explicit_blend(cell, t.grid.cell_rect(cell), terms, c);
        FAIL("no throw");
      } catch (const BlendValidationError& err) {
        CHECK(err.value() > 1.0);
      }
    } else {
      const PatchBlend h = load_explicit_blend(cell, t.grid.cell_rect(cell), terms, c);
      CHECK(h.form() == BlendForm::explicit_polynomial);
      const Rect r = t.grid.cell_rect(cell);
      CHECK(h(r.x0, r.y0) == doctest::Approx(kZ[cell.j - 1][cell.i - 1]).epsilon(1e-9));
      CHECK(h(r.x1, r.y1) == doctest::Approx(kZ[cell.j][cell.i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("Coons patches reproduce their four edges") {
  Table t;
  const BoundaryCurves c = build_boundary_curves(t.grid, CurveMethod::pieces, &t.cfg.pieces);
  for (const CellIndex cell : t.grid.cells()) {
    const PatchBlend h = build_coons_blend(t.grid, c, cell);
    CHECK(h.form() == BlendForm::coons);
    const EdgeCheck e = check_blend_edges(h, c, 256);
    CHECK(e.max_error < 1e-12);
    const Rect r = t.grid.cell_rect(cell);
    for (int k = 0; k <= 16; ++k) {
      const double x = r.x0 + r.width() * k / 16;
      const double y = r.y0 + r.height() * k / 16;
      CHECK(h(x, r.y0) == doctest::Approx(c.r[cell.j - 1](x)).epsilon(1e-12));
      CHECK(h(r.x1, y) == doctest::Approx(c.q[cell.i](y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Coons patch of linear edges is bilinear") {
  const DataGrid g = DataGrid::from_rows({0, 1, 2}, {0, 1, 2}, {{0, 1, 2}, {1, 3, 5}, {2, 5, 8}});
  const BoundaryCurves c = build_boundary_curves(g, CurveMethod::linear);
  const PatchBlend h = build_coons_blend(g, c, {1, 1});
  // z = x + y + xy at the knots.
  CHECK(h(0.3, 0.6) == doctest::Approx(0.3 + 0.6 + 0.18));
}

TEST_CASE("mismatched corners are incompatible") {
  const DataGrid g = DataGrid::from_rows({0, 1, 2}, {0, 1, 2}, {{0, 1, 2}, {1, 3, 5}, {2, 5, 8}});
  BoundaryCurves c = build_boundary_curves(g, CurveMethod::linear);
  const BoundaryCurve bad(CurveAxis::x_line, 0, CurveMethod::pieces, {0, 1, 2},
                          {Polynomial{{0.5, 1}}, Polynomial{{0.5, 1}}});
  CHECK_THROWS_AS(build_coons_blend({1, 1}, g.cell_rect({1, 1}), bad, c.q[1], c.r[0], c.r[1]),
                  CompatibilityError);
}

TEST_CASE("free fields and Q") {
  const FreeField g = make_free_field("sin(pi^2*x*y)", {0, 1, 0, 1});
  CHECK(g.gradient.dx >= M_PI * M_PI - 1e-9);
  CHECK(g.range.contains(1.0));
  CHECK(g.range.contains(-1.0));
  CHECK_THROWS_AS(make_free_field("1/(x-0.5)", {0, 1, 0, 1}), std::invalid_argument);
  const FreeField fixed = make_free_field("x", {0, 1, 0, 1}, 5.0);
  CHECK(fixed.gradient.taxicab() == 5.0);

  const DataGrid grid = DataGrid::from_rows({0, 0.5, 1}, {0, 0.5, 1},
                                            {{0, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  const BoundaryCurves curves = build_boundary_curves(grid, CurveMethod::linear);
  const auto maps = build_domain_maps(grid);
  const CellIndex cell{1, 1};
  const ScalingField s = make_separable_quartic(cell, grid.cell_rect(cell), 100);
  const PatchBlend h = build_coons_blend(grid, curves, cell);
  const QField q = build_Q(maps[0], s, g, h);
  for (const Point2 p : {Point2{0.3, 0.4}, Point2{0.9, 0.1}, Point2{0.5, 0.5}}) {
    const Point2 lp = maps[0](p);
    CHECK(q(p) == doctest::Approx(-s(lp) * g(p) + h(lp)).epsilon(1e-14));
  }
  CHECK(q.lipschitz() > 0.0);
}

TEST_CASE("worked curve values") {
  Table t;
  const BoundaryCurves lin = build_boundary_curves(t.grid, CurveMethod::linear);
  CHECK(lin.r[0](0.125) == doctest::Approx(0.7));
  const BoundaryCurves c = build_boundary_curves(t.grid, CurveMethod::pieces, &t.cfg.pieces);
  CHECK(c.r[3](0.0) == doctest::Approx(2.0));
  CHECK(c.r[3](0.25) == doctest::Approx(3.0));
  CHECK(c.q[0](1.0 / 3.0) == doctest::Approx(0.3));
}

TEST_CASE("constant curves give a constant Coons patch") {
  const DataGrid g({0, 1, 2}, {0, 1, 2}, std::vector<double>(9, 4.25));
  const BoundaryCurves c = build_boundary_curves(g, CurveMethod::linear);
  const PatchBlend h = build_coons_blend(g, c, {2, 1});
  for (double x : {1.0, 1.3, 2.0})
    for (double y : {0.0, 0.6, 1.0}) CHECK(h(x, y) == doctest::Approx(4.25));
}

TEST_CASE("a zero table is not a blend for non-zero data") {
  Table t;
  const BoundaryCurves c = build_boundary_curves(t.grid, CurveMethod::pieces, &t.cfg.pieces);
  CHECK_THROWS_AS(load_explicit_blend({1, 1}, t.grid.cell_rect({1, 1}), {}, c), BlendValidationError);
}

TEST_CASE("neighbouring explicit blends agree along shared knot lines") {
  Table t;
  const BoundaryCurves c = build_boundary_curves(t.grid, CurveMethod::pieces, &t.cfg.pieces);
  std::map<CellIndex, PatchBlend> h;
  for (const CellIndex cell : t.grid.cells()) {
    const auto& terms = t.cfg.blend.tables.at(cell);
    h.emplace(cell, cell == CellIndex{4, 1} ? build_coons_blend(t.grid, c, cell)
                                            : load_explicit_blend(cell, t.grid.cell_rect(cell), terms, c));
  }
  double worst = 0.0;
  for (const auto& [cell, blend] : h) {
    const Rect r = blend.rect();
    CHECK(check_blend_edges(blend, c, 1024).max_error < 1e-10);
    for (int k = 0; k <= 256; ++k) {
      const double y = r.y0 + r.height() * k / 256;
      const double x = r.x0 + r.width() * k / 256;
      if (cell.i < 4) worst = std::max(worst, std::abs(blend(r.x1, y) - h.at({cell.i + 1, cell.j})(r.x1, y)));
      if (cell.j < 3) worst = std::max(worst, std::abs(blend(x, r.y1) - h.at({cell.i, cell.j + 1})(x, r.y1)));
    }
    // corners reproduce the data
    CHECK(blend(r.x1, r.y0) == doctest::Approx(kZ[cell.j - 1][cell.i]).epsilon(1e-10));
    CHECK(blend(r.x0, r.y1) == doctest::Approx(kZ[cell.j][cell.i - 1]).epsilon(1e-10));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Q identity at random points") {
  Table t;
  const BoundaryCurves c = build_boundary_curves(t.grid, CurveMethod::pieces, &t.cfg.pieces);
  const auto maps = build_domain_maps(t.grid);
  const FreeField g = make_free_field("sin(pi^2*x*y)", t.grid.domain());
  const FreeField zero = make_free_field("0", t.grid.domain());
  const CellIndex cell{2, 2};
  const DomainMap& m = maps[static_cast<std::size_t>(t.grid.cell_offset(cell))];
  const ScalingField s = make_separable_quartic(cell, t.grid.cell_rect(cell), 2300);
  const PatchBlend h = load_explicit_blend(cell, t.grid.cell_rect(cell), t.cfg.blend.tables.at(cell), c);
  const QField q = build_Q(m, s, g, h);
  const QField q0 = build_Q(m, s, zero, h);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst0 = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Point2 p{u(rng), u(rng)};
    const Point2 lp = m(p);
    worst = std::max(worst, std::abs(q(p) - (-s(lp) * g(p) + h(lp))));
    worst0 = std::max(worst0, std::abs(q0(p) - h(lp)));
  }
  CHECK(worst < 1e-12);
  CHECK(worst0 < 1e-12);
  // at the corner of E the g term drops out
  CHECK(q({0, 0}) == doctest::Approx(h(m({0, 0}))).epsilon(1e-14));
}
