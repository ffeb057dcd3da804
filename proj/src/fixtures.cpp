// Built-in job configurations.

#include <algorithm>
#include <array>

#include "fractsurf/config.hpp"
#include "fractsurf/errors.hpp"

namespace fractsurf {

namespace {

// a t^2 + b t + c, in the order the pieces are usually written down.
Polynomial quad(double a, double b, double c) { return {{c, b, a}}; }

GridSpec sample_grid() {
  GridSpec g;
  g.x = {0, 0.25, 0.5, 0.75, 1};
  g.y = {0, 1.0 / 3.0, 2.0 / 3.0, 1};
  g.rows = {
      {0.3, 1.1, 0.2, 1.5, 2},
      {0.3, 2, 1.8, 1.5, 2},
      {3, 2, 3, 3.3, 3},
      {2, 3, 2.5, 4, 4.5},
  };
  return g;
}

CurvePieces sample_curves() {
  CurvePieces p;
  p.q = {
      {quad(18, -6, 0.3), quad(18, -9.9, 1.6), quad(-18, 27, -7)},
      {quad(4.5, 1.2, 1.1), quad(9, -9, 4), quad(18, -27, 12)},
      {quad(8.1, 2.1, 0.2), quad(9, -5.4, 2.6), quad(-9, 13.5, -2)},
      // Leading coefficient +4.5: with -4.5 the piece misses z(3,2) = 3.3 and z(3,3) = 4.
      {quad(9, -3, 1.5), quad(9, -3.6, 1.7), quad(4.5, -5.4, 4.9)},
      {quad(9, -3, 2), quad(18, -15, 5), quad(9, -10.5, 6)},
  };
  p.r = {
      {quad(6.4, 1.6, 0.3), quad(-16, 8.4, 0), quad(16, -14.8, 3.6), quad(4.8, -6.4, 3.6)},
      {quad(8, 4.8, 0.3), quad(-16, 11.2, 0.2), quad(-9.6, 10.8, -1.2), quad(4.8, -6.4, 3.6)},
      {quad(-32, 4, 3), quad(32, -20, 5), quad(3.2, -2.8, 3.6), quad(-16, 26.8, -7.8)},
      {quad(32, -4, 2), quad(-16, 10, 1.5), quad(16, -14, 5.5), quad(16, -26, 14.5)},
  };
  return p;
}

// h_ij as {coefficient, x power, y power}, global coordinates.
std::map<CellIndex, std::vector<MonomialTerm>> sample_blends() {
  return {
      {{1, 1}, {{18, 0, 2}, {4.8, 2, 1}, {-54, 1, 2}, {6.4, 2, 0}, {27.6, 1, 1}, {1.6, 1, 0}, {-6, 0, 1}, {0.3, 0, 0}}},
      {{1, 2}, {{18, 0, 2}, {-120, 2, 1}, {-36, 1, 2}, {48, 2, 0}, {33.6, 1, 1}, {-2.4, 1, 0}, {-9.9, 0, 1}, {1.6, 0, 0}}},
      {{1, 3}, {{-18, 0, 2}, {192, 2, 1}, {144, 1, 2}, {-160, 2, 0}, {-264, 1, 1}, {116, 1, 0}, {27, 0, 1}, {-7, 0, 0}}},
      {{2, 1}, {{0.9, 0, 2}, {14.4, 1, 2}, {-16, 2, 0}, {3.6, 1, 1}, {8.4, 1, 0}, {0.3, 0, 1}}},
      {{2, 2}, {{9, 0, 2}, {144, 2, 1}, {-64, 2, 0}, {-93.6, 1, 1}, {42.4, 1, 0}, {5.4, 0, 1}, {-2.6, 0, 0}}},
      {{2, 3}, {{45, 0, 2}, {-144, 2, 1}, {-108, 1, 2}, {128, 2, 0}, {270, 1, 1}, {-152, 1, 0}, {-85.5, 0, 1}, {42, 0, 0}}},
      {{3, 1}, {{6.3, 0, 2}, {-76.8, 2, 1}, {3.6, 1, 2}, {16, 2, 0}, {75.6, 1, 1}, {-14.8, 1, 0}, {-16.5, 0, 1}, {3.6, 0, 0}}},
      {{3, 2}, {{9, 0, 2}, {38.4, 2, 1}, {-22.4, 2, 0}, {-40.8, 1, 1}, {24.4, 1, 0}, {5.4, 0, 1}, {-4, 0, 0}}},
      {{3, 3}, {{-36, 0, 2}, {38.4, 2, 1}, {54, 1, 2}, {-22.4, 2, 0}, {-123.6, 1, 1}, {55.6, 1, 0}, {65.7, 0, 1}, {-24.2, 0, 0}}},
      // Same table as (1,3); it does not match the edges of cell (4,1), so
      // the fixture lets the Coons patch stand in for it.
      {{4, 1}, {{-18, 0, 2}, {192, 2, 1}, {144, 1, 2}, {-160, 2, 0}, {-264, 1, 1}, {116, 1, 0}, {27, 0, 1}, {-7, 0, 0}}},
      {{4, 2}, {{-18, 0, 2}, {-62.4, 2, 1}, {36, 1, 2}, {25.6, 2, 0}, {63.6, 1, 1}, {-31.6, 1, 0}, {-16.2, 0, 1}, {11, 0, 0}}},
      {{4, 3}, {{-9, 0, 2}, {96, 2, 1}, {18, 1, 2}, {-80, 2, 0}, {-188.4, 1, 1}, {144.4, 1, 0}, {81.9, 0, 1}, {-58.4, 0, 0}}},
  };
}

// Quartic coefficients c_ij, listed by cell (i, j) with j fastest.
using QuarticTable = std::array<double, 12>;

constexpr QuarticTable kFamilyA = {2120, 150, 400, -2111, 2300, -950, 333, -1903, 435, -2123, 666, -2119};
constexpr QuarticTable kFamilyB = {2119, 1580, -2111, 1888, 2300, -2103, 1989, -1903, 2003, -2123, 1673, -2118};

JobConfig sample_job(const std::string& name, const QuarticTable& c, const std::string& g) {
  JobConfig cfg;
  cfg.name = name;
  cfg.grid = sample_grid();
  int k = 0;
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 3; ++j) {
      ScalingSpec s;
      s.form = ScalingForm::separable_quartic;
      s.coefficient = c[static_cast<std::size_t>(k++)];
      cfg.scaling[{i, j}] = s;
    }
  }
  cfg.curve_method = CurveMethod::pieces;
  cfg.pieces = sample_curves();
  cfg.blend.mode = BlendForm::explicit_polynomial;
  cfg.blend.fallback_to_coons = true;
  cfg.blend.tables = sample_blends();
  cfg.g.expression = g;
  cfg.solver = {769, 1e-6, 100000};
  cfg.chaos = {100000, 1};
  cfg.output_dir = "out/" + name;
  return cfg;
}

GridSpec square_grid(double z00, double z10, double z20, double z01, double z11, double z21,
                     double z02, double z12, double z22) {
  GridSpec g;
  g.x = {0, 0.5, 1};
  g.y = {0, 0.5, 1};
  g.rows = {{z00, z10, z20}, {z01, z11, z21}, {z02, z12, z22}};
  return g;
}

JobConfig smooth_job(const std::string& name, GridSpec grid, double c, const std::string& g) {
  JobConfig cfg;
  cfg.name = name;
  cfg.grid = std::move(grid);
  ScalingSpec s;
  s.form = ScalingForm::separable_quartic;
  s.coefficient = c;
  cfg.scaling_default = s;
  cfg.curve_method = CurveMethod::linear;
  cfg.blend.mode = BlendForm::coons;
  cfg.g.expression = g;
  cfg.solver = {257, 1e-9, 100000};
  cfg.dimension.levels = 5;
  cfg.chaos = {10000, 1};
  cfg.output_dir = "out/" + name;
  return cfg;
}

JobConfig flat_job() {
  // g equal to the data height makes the constant a fixed point for any s.
  return smooth_job("flat", square_grid(1.5, 1.5, 1.5, 1.5, 1.5, 1.5, 1.5, 1.5, 1.5), 200, "1.5");
}

JobConfig bilinear_job() {
  // z = 1 + 0.5x + 2y + 3xy at the knots, s = 0: the Coons patchwork is that surface.
  auto z = [](double x, double y) { return 1 + 0.5 * x + 2 * y + 3 * x * y; };
  return smooth_job("bilinear",
                    square_grid(z(0, 0), z(0.5, 0), z(1, 0), z(0, 0.5), z(0.5, 0.5), z(1, 0.5),
                                z(0, 1), z(0.5, 1), z(1, 1)),
                    0, "0");
}

JobConfig band_job() {
  JobConfig cfg;
  cfg.name = "band2x2";
  cfg.grid = square_grid(0, 0.5, 1, 0.5, 2, 1, 1, 1.2, 2);
  // s = 0.9 tanh(psi * edge product): |s| sits at 0.9 except in thin layers along the edges.
  ScalingSpec s;
  s.form = ScalingForm::polynomial_product;
  s.psi = "1e6";
  s.outer = "0.9*tanh(t)";
  cfg.scaling_default = s;
  cfg.curve_method = CurveMethod::linear;
  cfg.blend.mode = BlendForm::coons;
  cfg.g.expression = "0";
  cfg.solver = {1025, 1e-6, 100000};
  cfg.chaos = {100000, 1};
  cfg.output_dir = "out/band2x2";
  return cfg;
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"example2a", "example2b-sin", "flat", "bilinear", "band2x2"};
}

JobConfig load_fixture(const std::string& name) {
  if (name == "example2a") return sample_job(name, kFamilyA, "0");
  if (name == "example2b-sin") return sample_job(name, kFamilyB, "sin(pi^2*x*y)");
  if (name == "flat") return flat_job();
  if (name == "bilinear") return bilinear_job();
  if (name == "band2x2") return band_job();
  std::string known;
  for (const std::string& n : fixture_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigurationError("unknown fixture '" + name + "' (known: " + known + ")");
}

}  // namespace fractsurf
