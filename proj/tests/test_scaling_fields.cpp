#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fractsurf/errors.hpp"
#include "fractsurf/scaling_fields.hpp"

using namespace fractsurf;

namespace {

// sup of |c (x - a)(x - b)(y - c)(y - d)| is |c| (w h / 4)^2, attained at the centre.
double quartic_sup(double c, const Rect& r) {
  const double q = r.width() * r.height() / 4.0;
  return std::abs(c) * q * q;
}

const Rect kCell{0.25, 0.5, 1.0 / 3.0, 2.0 / 3.0};

}  // namespace

TEST_CASE("separable quartic certificate is analytic") {
  for (double c : {2300.0, -2123.0, 150.0, 0.0}) {
    CAPTURE(c);
    const ScalingField f = make_separable_quartic({2, 2}, kCell, c);
    CHECK(f.form() == ScalingForm::separable_quartic);
    CHECK(f.coefficient() == c);
    CHECK(f.sup_abs() == doctest::Approx(quartic_sup(c, kCell)).epsilon(1e-12));
    CHECK(f.sup_abs() == doctest::Approx(std::abs(c) / 2304.0).epsilon(1e-12));
    CHECK(f.certificate().analytic);
    CHECK(sampled_sup(f, 512) == doctest::Approx(f.sup_abs()).epsilon(1e-12));
  }
}

TEST_CASE("quartic fields vanish on the cell edges") {
  const ScalingField f = make_separable_quartic({2, 2}, kCell, 2000);
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    const double x = kCell.x0 + t * kCell.width();
    const double y = kCell.y0 + t * kCell.height();
    CHECK(std::abs(f(x, kCell.y0)) < 1e-12);
    CHECK(std::abs(f(x, kCell.y1)) < 1e-12);
    CHECK(std::abs(f(kCell.x0, y)) < 1e-12);
    CHECK(std::abs(f(kCell.x1, y)) < 1e-12);
  }
}

TEST_CASE("magnitude 1 and above is refused with a witness") {
  CHECK_NOTHROW(make_separable_quartic({2, 2}, kCell, 2303));
  try {
    make_separable_quartic({2, 2}, kCell, 2305);
    FAIL("no throw");
  } catch (const MagnitudeViolation& err) {
    CHECK(err.value() == doctest::Approx(2305.0 / 2304.0));
    CHECK(err.witness().x == doctest::Approx(kCell.center().x));
    CHECK(err.witness().y == doctest::Approx(kCell.center().y));
  }
  CHECK_THROWS_AS(make_separable_quartic({2, 2}, kCell, 2304), MagnitudeViolation);
}

TEST_CASE("product form with unit exponents reproduces the quartic") {
  const ScalingField p =
      build_product_field({2, 2}, kCell, Expr(1500.0), EdgeExponents{}, Expr::variable(Var::t));
  const ScalingField q = make_separable_quartic({2, 2}, kCell, 1500);
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; b <= 8; ++b) {
      const double x = kCell.x0 + kCell.width() * a / 8, y = kCell.y0 + kCell.height() * b / 8;
      CHECK(p(x, y) == doctest::Approx(q(x, y)).epsilon(1e-12).scale(1e-12));
    }
  }
  CHECK(p.sup_abs() >= q.sup_abs() - 1e-12);
  CHECK(p.sup_abs() < q.sup_abs() + 1e-3);
}

TEST_CASE("product form with psi 2305 violates") {
  CHECK_THROWS_AS(
      build_product_field({2, 2}, kCell, Expr(2305.0), EdgeExponents{}, Expr::variable(Var::t)),
      MagnitudeViolation);
}

TEST_CASE("product form rejects exponents below 1 and outer maps with d(0) != 0") {
  CHECK_THROWS_AS(build_product_field({1, 1}, kCell, Expr(1.0), EdgeExponents{0.5, 1, 1, 1},
                                       Expr::variable(Var::t)),
                  std::invalid_argument);
  CHECK_THROWS(build_product_field({1, 1}, kCell, Expr(1.0), EdgeExponents{},
                                    parse_expression("t + 0.1")));
}

TEST_CASE("non-integer exponents use magnitudes") {
  const ScalingField f = build_product_field({1, 1}, kCell, Expr(100.0),
                                              EdgeExponents{1.5, 1.5, 2, 1}, parse_expression("t"));
  const Point2 c = kCell.center();
  const double hx = std::pow(kCell.width() / 2, 1.5);
  const double hy = kCell.height() / 2;
  // (y - y_j)^2 keeps its sign convention as an integer power; (y - y_{j-1})^1 is +hy.
  const double expected = 100.0 * hx * hx * hy * hy * hy;
  CHECK(f(c) == doctest::Approx(expected));
  CHECK(f.sup_abs() < 1.0);
}

TEST_CASE("expression fields must vanish on the boundary") {
  const Expr good = parse_expression("2000*(x-0.25)*(x-0.5)*(y-1/3)*(y-2/3)");
  CHECK_NOTHROW(make_expression_field({2, 2}, kCell, good));
  try {
    make_expression_field({2, 2}, kCell, parse_expression("0.1 + 0*x"));
    FAIL("no throw");
  } catch (const BoundaryViolation& err) {
    CHECK(err.value() == doctest::Approx(0.1));
  }
  CHECK_THROWS_AS(make_expression_field({2, 2}, kCell, parse_expression("3000*(x-0.25)*(x-0.5)*(y-1/3)*(y-2/3)")),
                  MagnitudeViolation);
}

TEST_CASE("sampled certification adds a Lipschitz slack") {
  const Expr s = parse_expression("0.9*sin(pi*(x-0.25)/0.25)*sin(pi*(y-1/3)*3)");
  const ScalingField f = make_expression_field({2, 2}, kCell, s);
  CHECK_FALSE(f.certificate().analytic);
  CHECK(f.sup_abs() >= 0.9);
  CHECK(f.sup_abs() < 0.95);
  CHECK(f.certificate().sampled_sup == doctest::Approx(0.9).epsilon(1e-4));
}

TEST_CASE("interior extrema of a quartic") {
  const ScalingField f = make_separable_quartic({2, 2}, kCell, 2300);
  const double eps = kCell.width() / 64;
  const InteriorExtrema e = interior_extrema(f, eps);
  CHECK(e.s_bar == doctest::Approx(2300.0 / 2304.0).epsilon(1e-9));
  // Minimum of |s| over the shrunk cell sits at a corner of the shrunk cell.
  const double corner = 2300 * eps * (kCell.width() - eps) * eps * (kCell.height() - eps);
  CHECK(e.s_underbar == doctest::Approx(corner).epsilon(1e-6));
  CHECK(e.open_interior_infimum == 0.0);
  CHECK(e.epsilon == eps);
  CHECK_THROWS_AS(interior_extrema(f, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(interior_extrema(f, kCell.width() / 2), std::invalid_argument);
}

TEST_CASE("worked value of the first example field") {
  const Rect cell{0.0, 0.25, 0.0, 1.0 / 3.0};
  const ScalingField s11 = make_separable_quartic({1, 1}, cell, 2120);
  const double expected = 2120 * (0.125 * -0.125) * (1.0 / 6.0 * -1.0 / 6.0);
  CHECK(s11(0.125, 1.0 / 6.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.920139).epsilon(1e-6));
  CHECK(s11.sup_abs() == doctest::Approx(expected).epsilon(1e-12));
  for (double y : {0.0, 0.1, 0.3}) CHECK(s11(0.0, y) == 0.0);
}

TEST_CASE("certified sup scales linearly with the coefficient") {
  const ScalingField base = make_separable_quartic({2, 2}, kCell, 230);
  for (double k : {1.0, 2.0, 5.5, 10.0}) {
    const ScalingField f = make_separable_quartic({2, 2}, kCell, 230 * k);
    CHECK(f.sup_abs() == doctest::Approx(k * base.sup_abs()).epsilon(1e-14));
  }
}

TEST_CASE("boundary samples vanish for the fixture fields") {
  const ScalingField q = make_separable_quartic({2, 2}, kCell, -2111);
  const ScalingField p = build_product_field({2, 2}, kCell, Expr(1e6), EdgeExponents{},
                                              parse_expression("0.9*tanh(t)"));
  for (const ScalingField* f : {&q, &p}) {
    double worst = 0.0;
    for (int k = 0; k <= 1024; ++k) {
      const double x = kCell.x0 + kCell.width() * k / 1024;
      const double y = kCell.y0 + kCell.height() * k / 1024;
      worst = std::max({worst, std::abs((*f)(x, kCell.y0)), std::abs((*f)(x, kCell.y1)),
                        std::abs((*f)(kCell.x0, y)), std::abs((*f)(kCell.x1, y))});
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("interior extrema of zero and constant-sign fields") {
  const ScalingField zero = make_separable_quartic({2, 2}, kCell, 0);
  const InteriorExtrema z = interior_extrema(zero, kCell.width() / 64);
  CHECK(z.s_bar == 0.0);
  CHECK(z.s_underbar == 0.0);
  const ScalingField f = make_separable_quartic({2, 2}, kCell, 1800);
  const InteriorExtrema e = interior_extrema(f, kCell.width() / 4);
  CHECK(e.s_underbar > 0.0);
  CHECK(e.s_bar >= e.s_underbar);
}
