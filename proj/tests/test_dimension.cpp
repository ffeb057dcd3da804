#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fractsurf/config.hpp"
#include "fractsurf/dimension.hpp"
#include "fractsurf/errors.hpp"
#include "fractsurf/pipeline.hpp"

using namespace fractsurf;

TEST_CASE("hypotheses") {
  const DataGrid square = DataGrid::from_rows({0, 0.5, 1}, {0, 0.5, 1}, {{0, 0.5, 1}, {0.5, 2, 1}, {1, 1.2, 2}});
  const Applicability a = check_hypotheses(square);
  CHECK(a.applicable());
  CHECK(a.noncollinear_column == 1);

  const DataGrid planar = DataGrid::from_rows({0, 0.5, 1}, {0, 0.5, 1}, {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}});
  CHECK_FALSE(check_hypotheses(planar).applicable());
  CHECK(check_hypotheses(planar).square);
  CHECK(check_hypotheses(planar).uniform);

  const DataGrid nonuniform = DataGrid::from_rows({0, 0.3, 1}, {0, 0.5, 1}, {{0, 0.5, 1}, {0.5, 2, 1}, {1, 1.2, 2}});
  CHECK_FALSE(check_hypotheses(nonuniform).uniform);
  CHECK_FALSE(check_hypotheses(nonuniform).applicable());

  const DataGrid table = resolve_grid(load_fixture("example2a").grid);
  CHECK_FALSE(check_hypotheses(table).square);
  CHECK_FALSE(check_hypotheses(table).applicable());
  CHECK_FALSE(check_hypotheses(table).reason().empty());
}

TEST_CASE("theoretical bounds cases") {
  const std::vector<double> nine(4, 0.9);
  const TheoreticalBounds two_sided = theoretical_bounds(nine, nine, 2);
  CHECK(two_sided.kind == BoundsCase::bounds);
  CHECK(two_sided.lower == doctest::Approx(1 + std::log2(3.6)));
  CHECK(two_sided.upper == doctest::Approx(1 + std::log2(3.6)));
  CHECK(two_sided.upper == doctest::Approx(2.848).epsilon(1e-3));
  CHECK_FALSE(two_sided.gap_case);

  const std::vector<double> zeros(4, 0.0);
  const TheoreticalBounds two = theoretical_bounds(zeros, zeros, 2);
  CHECK(two.kind == BoundsCase::exactly_two);
  CHECK(two.lower == 2.0);
  CHECK(two.upper == 2.0);

  const TheoreticalBounds gap = theoretical_bounds(nine, std::vector<double>(4, 0.1), 2);
  CHECK(gap.kind == BoundsCase::bounds);
  CHECK(gap.gap_case);
  CHECK(gap.lower == 2.0);
  CHECK(gap.upper == doctest::Approx(1 + std::log2(3.6)));

  const std::vector<double> ninths(9, 0.5);
  const TheoreticalBounds three = theoretical_bounds(ninths, ninths, 3);
  CHECK(three.lower == doctest::Approx(1 + std::log(4.5) / std::log(3.0)));

  CHECK(theoretical_bounds(nine, nine, 3).kind == BoundsCase::inapplicable);
}

TEST_CASE("natural scales") {
  const auto d = natural_scales(2, 1.0, 4);
  REQUIRE(d.size() == 4);
  CHECK(d[0] == 0.5);
  CHECK(d[3] == 0.0625);
}

TEST_CASE("least squares recovers a power law") {
  CountsTable t;
  for (int k = 1; k <= 6; ++k) {
    const double delta = std::pow(2.0, -k);
    t.push_back({delta, 7.0 * std::pow(delta, -2.5)});
  }
  const DimensionFit f = estimate_dimension(t);
  CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-9));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.scales_used == 6);
  CHECK_FALSE(f.coarsest_excluded);
}

TEST_CASE("an outlying coarsest scale is dropped") {
  CountsTable t;
  for (int k = 1; k <= 8; ++k) {
    const double delta = std::pow(2.0, -k);
    t.push_back({delta, std::pow(delta, -2.3) * (k == 1 ? 3.0 : 1.0)});
  }
  const DimensionFit f = estimate_dimension(t);
  CHECK(f.coarsest_excluded);
  CHECK(f.scales_used == 7);
  CHECK(f.slope == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(f.residuals.size() == 8);
  CHECK(f.residuals[0] == doctest::Approx(std::log(3.0)).epsilon(1e-9));

  // With few scales the outlier drags the fit far enough to hide itself.
  t.resize(6);
  CHECK_FALSE(estimate_dimension(t).coarsest_excluded);
}

TEST_CASE("degenerate and short tables") {
  CHECK_THROWS_AS(estimate_dimension({{0.5, 4}, {0.25, 16}}), std::invalid_argument);
  const DimensionFit f = estimate_dimension({{0.5, 3}, {0.25, 3}, {0.125, 3}});
  CHECK(f.degenerate);
  CHECK_FALSE(f.warning.empty());
}

TEST_CASE("column counting of flat and sloped fields") {
  HeightField flat(65, {0, 1, 0, 1});
  for (double& v : flat.values()) v = 1.5;
  const auto deltas = natural_scales(2, 1.0, 4);
  const CountsTable c = box_count(flat, deltas);
  for (const CountRow& row : c) CHECK(row.count == doctest::Approx(1.0 / (row.delta * row.delta)));

  HeightField slope(65, {0, 1, 0, 1});
  for (int a = 0; a < 65; ++a)
    for (int b = 0; b < 65; ++b) slope.at(a, b) = 2.5 * slope.x(a);
  const CountsTable s = box_count(slope, deltas);
  for (const CountRow& row : s) {
    // each column spans 2.5 delta in height: ceil(2.5) + 1 boxes
    CHECK(row.count == doctest::Approx(4.0 / (row.delta * row.delta)));
  }
  for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k].count > s[k - 1].count);

  const std::vector<double> too_fine{1.0 / 32};
  CHECK_THROWS_AS(box_count(flat, too_fine), ConfigurationError);
}

TEST_CASE("point counting") {
  std::vector<Point3> pts;
  for (int a = 0; a < 64; ++a)
    for (int b = 0; b < 64; ++b) pts.push_back({(a + 0.5) / 64, (b + 0.5) / 64, 0.25});
  const std::vector<double> deltas{0.5, 0.25, 0.125};
  const CountsTable c = box_count_points(pts, {0, 1, 0, 1}, deltas);
  CHECK(c[0].count == 4);
  CHECK(c[1].count == 16);
  CHECK(c[2].count == 64);
}

TEST_CASE("analysis of the smooth fixtures") {
  for (const char* name : {"flat", "bilinear"}) {
    CAPTURE(name);
    const JobConfig cfg = load_fixture(name);
    const BuiltJob job = build_job(cfg);
    const SurfaceSample s = solve_fixed_point(job.system, {129, 1e-9, 100});
    DimensionOptions o;
    o.levels = 4;
    const DimensionReport r = analyse_dimension(job.system, s, o);
    CHECK(r.counts.size() == 4);
    CHECK(r.estimate() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(r.s_bar.size() == 4);
    CHECK(r.epsilon.size() == 4);
  }
}

TEST_CASE("hypotheses on a 4 x 4 grid") {
  const std::vector<double> k{0, 0.25, 0.5, 0.75, 1};
  std::vector<std::vector<double>> rows(5, std::vector<double>(5, 0.0));
  CHECK_FALSE(check_hypotheses(DataGrid::from_rows(k, k, rows)).applicable());
  rows[2][1] = 0.4;  // bump one interior value
  const Applicability a = check_hypotheses(DataGrid::from_rows(k, k, rows));
  CHECK(a.applicable());
  CHECK(a.noncollinear_column == 1);
}

TEST_CASE("exact power law over five scales") {
  CountsTable t;
  for (int k = 1; k <= 5; ++k) t.push_back({std::pow(3.0, -k), std::pow(3.0, 2.5 * k)});
  const DimensionFit f = estimate_dimension(t);
  CHECK(std::abs(f.slope - 2.5) < 1e-9);
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

namespace {

DimensionReport band_report(const JobConfig& cfg, int resolution) {
  const BuiltJob job = build_job(cfg);
  const SurfaceSample s = solve_fixed_point(job.system, {resolution, 1e-6, 100000});
  DimensionOptions o;
  o.levels = 5;
  return analyse_dimension(job.system, s, o);
}

}  // namespace

TEST_CASE("counts are monotone and the estimate is stable under resolution doubling") {
  const JobConfig cfg = load_fixture("band2x2");
  const DimensionReport a = band_report(cfg, 257);
  const DimensionReport b = band_report(cfg, 513);
  for (const DimensionReport* r : {&a, &b})
    for (std::size_t k = 1; k < r->counts.size(); ++k) CHECK(r->counts[k].count >= r->counts[k - 1].count);
  CHECK(std::abs(a.estimate() - b.estimate()) < 0.05);
  CHECK(a.bounds.kind == BoundsCase::bounds);
}

TEST_CASE("rescaling the domain and mapping back leaves the estimate in place") {
  // psi absorbs the change of the edge product so s o phi is the original field.
  JobConfig cfg = load_fixture("band2x2");
  const int R = 257;
  const BuiltJob job = build_job(cfg);
  const SurfaceSample s = solve_fixed_point(job.system, {R, 1e-6, 100000});
  const double base = analyse_dimension(job.system, s).estimate();

  const double sx = 2.0, sy = 3.0;
  for (double& x : cfg.grid.x) x = 5 + sx * x;
  for (double& y : cfg.grid.y) y = -1 + sy * y;
  cfg.scaling_default->psi = "1e6/36";
  const BuiltJob moved = build_job(cfg);
  const SurfaceSample ms = solve_fixed_point(moved.system, {R, 1e-6, 100000});
  SurfaceSample back = s;
  std::copy(ms.heights.values().begin(), ms.heights.values().end(), back.heights.values().begin());
  double gap = 0.0;
  for (std::size_t k = 0; k < back.heights.values().size(); ++k)
    gap = std::max(gap, std::abs(back.heights.values()[k] - s.heights.values()[k]));
  CHECK(gap < 1e-9);
  CHECK(std::abs(analyse_dimension(job.system, back).estimate() - base) < 0.02);
}

TEST_CASE("the table grid gets an annotated estimate without a band") {
  const BuiltJob job = build_job(load_fixture("example2a"));
  const SurfaceSample s = solve_fixed_point(job.system, {385, 1e-4, 100000});
  DimensionOptions o;
  o.levels = 3;
  const DimensionReport r = analyse_dimension(job.system, s, o);
  CHECK_FALSE(r.applicability.applicable());
  CHECK(r.annotation.find("no theoretical band") != std::string::npos);
  CHECK(r.s_bar.size() == 12);
  CHECK(r.counts.size() == 3);
}
