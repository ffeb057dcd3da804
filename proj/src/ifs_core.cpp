#include "fractsurf/ifs_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fractsurf/errors.hpp"

namespace fractsurf {

namespace {

std::string cell_name(CellIndex c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")";
}

// Fractional node position of t on an axis of `resolution` nodes over [lo, hi].
double node_position(double t, double lo, double hi, int resolution) {
  return (t - lo) / (hi - lo) * (resolution - 1);
}

void split_position(double pos, int resolution, std::uint32_t& base, double& weight) {
  pos = std::clamp(pos, 0.0, static_cast<double>(resolution - 1));
  double fl = std::floor(pos);
  if (fl > resolution - 2) fl = resolution - 2;
  double w = pos - fl;
  // Snap pull-backs that land on a node up to rounding.
  if (w < 1e-9) w = 0.0;
  if (w > 1.0 - 1e-9) w = 1.0;
  base = static_cast<std::uint32_t>(fl);
  weight = w;
}

}  // namespace

// ---------------------------------------------------------------------------
// IfsSystem

double IfsSystem::eval_F(CellIndex c, double x, double y, double z) const {
  const CellMaps& cm = cell(c);
  const Point2 lp = cm.map({x, y});
  return cm.s(lp) * z + cm.q({x, y});
}

Point3 IfsSystem::apply_W(CellIndex c, Point3 p) const {
  const CellMaps& cm = cell(c);
  const Point2 lp = cm.map({p.x, p.y});
  return {lp.x, lp.y, cm.s(lp) * p.z + cm.q({p.x, p.y})};
}

IfsSystem assemble_ifs(DataGrid grid, BoundaryCurves curves, std::vector<DomainMap> maps,
                       std::vector<ScalingField> scaling, std::vector<FreeField> free_fields,
                       std::vector<PatchBlend> blends) {
  const auto count = static_cast<std::size_t>(grid.cell_count());
  if (maps.size() != count || scaling.size() != count || free_fields.size() != count ||
      blends.size() != count) {
    throw std::invalid_argument("assemble_ifs: expected " + std::to_string(count) +
                                " entries per component");
  }
  if (curves.q.size() != static_cast<std::size_t>(grid.n() + 1) ||
      curves.r.size() != static_cast<std::size_t>(grid.m() + 1)) {
    throw std::invalid_argument("assemble_ifs: boundary curves do not match the grid");
  }

  IfsSystem sys;
  const Rect e = grid.domain();
  const double tol = geometric_tolerance(e);
  double area = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const CellIndex c = grid.cell_at(static_cast<int>(k));
    if (maps[k].cell != c || scaling[k].cell() != c || blends[k].cell() != c) {
      throw std::invalid_argument("assemble_ifs: component order does not match cell " + cell_name(c));
    }
    if (!(scaling[k].sup_abs() < 1.0)) {
      std::ostringstream msg;
      msg << "scaling field " << cell_name(c) << " has sup |s| = " << scaling[k].sup_abs() << " >= 1";
      throw MagnitudeViolation(msg.str(), scaling[k].certificate().witness, scaling[k].sup_abs());
    }
    // Image of E under L_ij must be exactly E_ij.
    const Point2 p0 = maps[k]({e.x0, e.y0});
    const Point2 p1 = maps[k]({e.x1, e.y1});
    const Rect image{std::min(p0.x, p1.x), std::max(p0.x, p1.x), std::min(p0.y, p1.y),
                     std::max(p0.y, p1.y)};
    const Rect want = grid.cell_rect(c);
    if (std::abs(image.x0 - want.x0) > tol || std::abs(image.x1 - want.x1) > tol ||
        std::abs(image.y0 - want.y0) > tol || std::abs(image.y1 - want.y1) > tol) {
      throw InvalidGrid("map of cell " + cell_name(c) + " does not map the domain onto its cell");
    }
    area += image.width() * image.height();
  }
  const double total = e.width() * e.height();
  if (std::abs(area - total) > 1e-12 * std::max(1.0, total)) {
    throw InvalidGrid("cell images do not tile the domain");
  }

  ContractionCertificate cert;
  sys.cells_.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    QField q = build_Q(maps[k], scaling[k], free_fields[k], blends[k]);
    cert.map_contraction = std::max(cert.map_contraction, maps[k].contraction());
    cert.q_lipschitz = std::max(cert.q_lipschitz, q.lipschitz());
    cert.vertical_contraction = std::max(cert.vertical_contraction, scaling[k].sup_abs());
    sys.cells_.push_back(CellMaps{maps[k], std::move(scaling[k]), std::move(free_fields[k]),
                                  std::move(blends[k]), std::move(q)});
  }
  sys.grid_ = std::move(grid);
  sys.curves_ = std::move(curves);
  sys.certificate_ = cert;
  return sys;
}

// ---------------------------------------------------------------------------
// HeightField

HeightField::HeightField(int resolution, const Rect& domain)
    : resolution_(resolution), domain_(domain) {
  if (resolution < 2) throw std::invalid_argument("HeightField: resolution must be >= 2");
  xs_.resize(static_cast<std::size_t>(resolution));
  ys_.resize(static_cast<std::size_t>(resolution));
  for (int a = 0; a < resolution; ++a) {
    xs_[static_cast<std::size_t>(a)] = domain.x0 + domain.width() * a / (resolution - 1);
    ys_[static_cast<std::size_t>(a)] = domain.y0 + domain.height() * a / (resolution - 1);
  }
  xs_.back() = domain.x1;
  ys_.back() = domain.y1;
  values_.assign(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution), 0.0);
}

void HeightField::snap_to(std::span<const double> x_knots, std::span<const double> y_knots) {
  auto snap = [&](std::vector<double>& coords, std::span<const double> knots, double lo, double hi) {
    for (double k : knots) {
      const double pos = node_position(k, lo, hi, resolution_);
      const double idx = std::round(pos);
      if (std::abs(pos - idx) < 1e-6 && idx >= 0 && idx < resolution_) {
        coords[static_cast<std::size_t>(idx)] = k;
      }
    }
  };
  snap(xs_, x_knots, domain_.x0, domain_.x1);
  snap(ys_, y_knots, domain_.y0, domain_.y1);
}

double HeightField::interpolate(Point2 p) const {
  std::uint32_t a0 = 0;
  std::uint32_t b0 = 0;
  double wx = 0.0;
  double wy = 0.0;
  split_position(node_position(p.x, domain_.x0, domain_.x1, resolution_), resolution_, a0, wx);
  split_position(node_position(p.y, domain_.y0, domain_.y1, resolution_), resolution_, b0, wy);
  const int a = static_cast<int>(a0);
  const int b = static_cast<int>(b0);
  return (1 - wx) * (1 - wy) * at(a, b) + wx * (1 - wy) * at(a + 1, b) +
         (1 - wx) * wy * at(a, b + 1) + wx * wy * at(a + 1, b + 1);
}

double HeightField::nearest(Point2 p) const {
  const auto clamp_index = [&](double pos) {
    return static_cast<int>(std::clamp(std::round(pos), 0.0, static_cast<double>(resolution_ - 1)));
  };
  return at(clamp_index(node_position(p.x, domain_.x0, domain_.x1, resolution_)),
            clamp_index(node_position(p.y, domain_.y0, domain_.y1, resolution_)));
}

double HeightField::local_oscillation(Point2 p, int radius) const {
  const auto base = [&](double pos) {
    return static_cast<int>(std::floor(std::clamp(pos, 0.0, static_cast<double>(resolution_ - 1))));
  };
  const int a0 = base(node_position(p.x, domain_.x0, domain_.x1, resolution_));
  const int b0 = base(node_position(p.y, domain_.y0, domain_.y1, resolution_));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int a = std::max(0, a0 - radius + 1); a <= std::min(resolution_ - 1, a0 + radius); ++a) {
    for (int b = std::max(0, b0 - radius + 1); b <= std::min(resolution_ - 1, b0 + radius); ++b) {
      lo = std::min(lo, at(a, b));
      hi = std::max(hi, at(a, b));
    }
  }
  return hi - lo;
}

double HeightField::local_step(Point2 p, int radius) const {
  const auto base = [&](double pos) {
    return static_cast<int>(std::floor(std::clamp(pos, 0.0, static_cast<double>(resolution_ - 1))));
  };
  const int a0 = base(node_position(p.x, domain_.x0, domain_.x1, resolution_));
  const int b0 = base(node_position(p.y, domain_.y0, domain_.y1, resolution_));
  const int a_lo = std::max(0, a0 - radius + 1);
  const int a_hi = std::min(resolution_ - 1, a0 + radius);
  const int b_lo = std::max(0, b0 - radius + 1);
  const int b_hi = std::min(resolution_ - 1, b0 + radius);
  double step = 0.0;
  for (int b = b_lo; b <= b_hi; ++b) {
    for (int a = a_lo; a <= a_hi; ++a) {
      if (a < a_hi) step = std::max(step, std::abs(at(a + 1, b) - at(a, b)));
      if (b < b_hi) step = std::max(step, std::abs(at(a, b + 1) - at(a, b)));
    }
  }
  return step;
}

double HeightField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double HeightField::max() const { return *std::max_element(values_.begin(), values_.end()); }

// ---------------------------------------------------------------------------
// T operator

void check_resolution(const DataGrid& grid, int resolution) {
  const int need = 4 * std::max(grid.n(), grid.m()) + 1;
  if (resolution < need) {
    throw ConfigurationError("resolution " + std::to_string(resolution) + " below the minimum " +
                             std::to_string(need) + " for this grid");
  }
  const Rect e = grid.domain();
  auto check_axis = [&](std::span<const double> knots, double lo, double hi, char axis) {
    for (std::size_t k = 0; k < knots.size(); ++k) {
      const double pos = node_position(knots[k], lo, hi, resolution);
      if (std::abs(pos - std::round(pos)) > 1e-6) {
        std::ostringstream msg;
        msg << "resolution " << resolution << " is not knot-aligned: " << axis << "_" << k << " = "
            << knots[k] << " falls at node position " << pos;
        throw ConfigurationError(msg.str());
      }
    }
  };
  check_axis(grid.x_knots(), e.x0, e.x1, 'x');
  check_axis(grid.y_knots(), e.y0, e.y1, 'y');
}

TOperator::TOperator(const IfsSystem& system, int resolution) : resolution_(resolution) {
  const DataGrid& grid = system.grid();
  check_resolution(grid, resolution);
  const Rect e = grid.domain();
  layout_ = HeightField(resolution, e);
  layout_.snap_to(grid.x_knots(), grid.y_knots());

  std::vector<PatchBlend> coons;
  coons.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (const CellIndex c : grid.cells()) coons.push_back(build_coons_blend(grid, system.curves(), c));

  const std::size_t total = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  s_.resize(total);
  g_.resize(total);
  h_.resize(total);
  coons_.resize(total);
  stencil_.resize(total);
  for (int b = 0; b < resolution; ++b) {
    for (int a = 0; a < resolution; ++a) {
      const std::size_t k = static_cast<std::size_t>(b) * static_cast<std::size_t>(resolution) +
                            static_cast<std::size_t>(a);
      const Point2 p{layout_.x(a), layout_.y(b)};
      const CellIndex c = locate_cell(grid, p);
      const CellMaps& cm = system.cell(c);
      const Point2 pre = e.clamp(invert_map(cm.map, p));
      s_[k] = cm.s(p);
      h_[k] = cm.h(p);
      g_[k] = cm.g(pre);
      coons_[k] = coons[static_cast<std::size_t>(grid.cell_offset(c))](p);
      Stencil st{};
      split_position(node_position(pre.x, e.x0, e.x1, resolution), resolution, st.a0, st.wx);
      split_position(node_position(pre.y, e.y0, e.y1, resolution), resolution, st.b0, st.wy);
      if ((st.wx != 0.0 && st.wx != 1.0) || (st.wy != 0.0 && st.wy != 1.0)) pullback_exact_ = false;
      stencil_[k] = st;
      node_contraction_ = std::max(node_contraction_, std::abs(s_[k]));
    }
  }
}

HeightField TOperator::apply(const HeightField& phi) const {
  if (phi.resolution() != resolution_) {
    throw ConfigurationError("apply_T: sample resolution " + std::to_string(phi.resolution()) +
                             " differs from operator resolution " + std::to_string(resolution_));
  }
  HeightField out = layout_;
  std::span<double> dst = out.values();
  const std::span<const double> src = phi.values();
  const auto r = static_cast<std::size_t>(resolution_);
  for (std::size_t k = 0; k < dst.size(); ++k) {
    if (s_[k] == 0.0) {
      dst[k] = h_[k];
      continue;
    }
    const Stencil& st = stencil_[k];
    const std::size_t base = st.b0 * r + st.a0;
    const double v = (1 - st.wx) * (1 - st.wy) * src[base] + st.wx * (1 - st.wy) * src[base + 1] +
                     (1 - st.wx) * st.wy * src[base + r] + st.wx * st.wy * src[base + r + 1];
    dst[k] = s_[k] * (v - g_[k]) + h_[k];
  }
  return out;
}

HeightField TOperator::initial() const {
  HeightField out = layout_;
  std::copy(coons_.begin(), coons_.end(), out.values().begin());
  return out;
}

HeightField TOperator::blend_patchwork() const {
  HeightField out = layout_;
  std::copy(h_.begin(), h_.end(), out.values().begin());
  return out;
}

HeightField apply_T(const IfsSystem& system, const HeightField& phi) {
  return TOperator(system, phi.resolution()).apply(phi);
}

SurfaceSample solve_fixed_point(const IfsSystem& system, const SolveOptions& options) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("solve_fixed_point: tol must be > 0");
  const TOperator op(system, options.resolution);
  const double c = system.certificate().vertical_contraction;
  const double factor = c / (1.0 - c);

  SurfaceSample out;
  out.contraction = c;
  out.pullback_exact = op.pullback_exact();
  HeightField phi = op.initial();
  double bound = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= options.max_iterations; ++k) {
    HeightField next = op.apply(phi);
    double diff = 0.0;
    const auto a = next.values();
    const auto b = phi.values();
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    out.differences.push_back(diff);
    phi = std::move(next);
    bound = factor * diff;
    if (bound <= options.tolerance) {
      out.heights = std::move(phi);
      out.iterations = k;
      out.error_bound = bound;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "fixed-point iteration did not reach tolerance " << options.tolerance << " in "
      << options.max_iterations << " iterations (last bound " << bound << ")";
  throw ConvergenceError(msg.str(), bound);
}

double estimate_discretization_bias(const IfsSystem& system, const SolveOptions& options) {
  if (TOperator(system, options.resolution).pullback_exact()) return 0.0;
  const SurfaceSample coarse = solve_fixed_point(system, options);
  SolveOptions fine_options = options;
  fine_options.resolution = 2 * options.resolution - 1;
  const SurfaceSample fine = solve_fixed_point(system, fine_options);
  double worst = 0.0;
  for (int b = 0; b < options.resolution; ++b) {
    for (int a = 0; a < options.resolution; ++a) {
      worst = std::max(worst, std::abs(coarse.heights.at(a, b) - fine.heights.at(2 * a, 2 * b)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Attractor sampling and checks

std::vector<Point3> chaos_game(const IfsSystem& system, std::size_t point_count, std::uint64_t seed) {
  const DataGrid& grid = system.grid();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, grid.cell_count() - 1);
  Point3 p{grid.x(0), grid.y(0), grid.z(0, 0)};
  for (int k = 0; k < 100; ++k) p = system.apply_W(grid.cell_at(pick(rng)), p);
  std::vector<Point3> out;
  out.reserve(point_count);
  for (std::size_t k = 0; k < point_count; ++k) {
    p = system.apply_W(grid.cell_at(pick(rng)), p);
    out.push_back(p);
  }
  return out;
}

MetricReport certify_metric(const IfsSystem& system, std::optional<double> theta, int pairs,
                            std::uint64_t seed) {
  const DataGrid& grid = system.grid();
  const Rect e = grid.domain();
  MetricReport report;
  report.theta_upper = system.certificate().theta_upper();
  report.pairs = pairs;

  const auto z = grid.z_values();
  const double z_lo = *std::min_element(z.begin(), z.end());
  const double z_hi = *std::max_element(z.begin(), z.end());
  const double span = std::max(z_hi - z_lo, 1.0);
  report.z_band = {z_lo - span, z_hi + span};

  const double z_mag = report.z_band.mag();
  for (const CellMaps& cm : system.cells()) {
    const double dx = cm.q.gradient().dx + cm.map.x_map.contraction() * cm.s.gradient().dx * z_mag;
    const double dy = cm.q.gradient().dy + cm.map.y_map.contraction() * cm.s.gradient().dy * z_mag;
    report.band_lipschitz = std::max(report.band_lipschitz, std::max(dx, dy));
  }
  const double c_l = system.certificate().map_contraction;
  report.band_theta_upper = report.band_lipschitz == 0.0
                                ? std::numeric_limits<double>::infinity()
                                : (1.0 - c_l) / report.band_lipschitz;
  report.theta = theta.value_or(std::isfinite(report.band_theta_upper) ? report.band_theta_upper / 2 : 1.0);
  report.theta_admissible = report.theta > 0.0 && report.theta < report.band_theta_upper;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(e.x0, e.x1);
  std::uniform_real_distribution<double> uy(e.y0, e.y1);
  std::uniform_real_distribution<double> uz(report.z_band.lo, report.z_band.hi);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double step = 1e-3 * std::max(e.width(), e.height());
  const double th = report.theta;
  auto rho = [th](Point3 a, Point3 b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y) + th * std::abs(a.z - b.z);
  };

  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Point3 p{ux(rng), uy(rng), uz(rng)};
    Point3 q;
    if (k % 2 == 0) {
      q = {ux(rng), uy(rng), uz(rng)};
    } else {
      // Nearby pairs probe the local Lipschitz behaviour.
      q = {std::clamp(p.x + step * unit(rng), e.x0, e.x1),
           std::clamp(p.y + step * unit(rng), e.y0, e.y1), p.z + step * unit(rng) / th};
    }
    const double d = rho(p, q);
    if (d == 0.0) continue;
    for (const CellIndex c : grid.cells()) {
      worst = std::max(worst, rho(system.apply_W(c, p), system.apply_W(c, q)) / d);
    }
  }
  report.sampled_factor = worst;
  if (report.theta_admissible && !(worst < 1.0)) {
    std::ostringstream msg;
    msg << "maps are not contractive in rho_theta at theta = " << th << ": sampled factor " << worst;
    throw CertificationError(msg.str());
  }
  return report;
}

ResidualReport self_affinity_residual(const IfsSystem& system, const SurfaceSample& sample,
                                      int points, std::uint64_t seed) {
  const Rect e = system.grid().domain();
  const HeightField& f = sample.heights;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(e.x0, e.x1);
  std::uniform_real_distribution<double> uy(e.y0, e.y1);
  ResidualReport out;
  out.points = points;
  for (int k = 0; k < points; ++k) {
    const Point2 p{ux(rng), uy(rng)};
    const double fp = f.interpolate(p);
    const double osc_p = f.local_oscillation(p);
    for (const CellMaps& cm : system.cells()) {
      const Point2 lp = cm.map(p);
      const double lhs = f.interpolate(lp);
      const double rhs = cm.s(lp) * (fp - cm.g(p)) + cm.h(lp);
      const double residual = std::abs(lhs - rhs);
      const double allowance =
          3.0 * (sample.error_bound + std::max(osc_p, f.local_oscillation(lp))) + 1e-12;
      out.max_residual = std::max(out.max_residual, residual);
      out.max_ratio = std::max(out.max_ratio, residual / allowance);
      if (residual > allowance) ++out.violations;
    }
  }
  return out;
}

OrbitAgreement chaos_agreement(const IfsSystem& system, const SurfaceSample& sample,
                               std::span<const Point3> orbit) {
  const Rect e = system.grid().domain();
  const HeightField& f = sample.heights;
  OrbitAgreement out;
  out.points = static_cast<int>(orbit.size());
  for (const Point3& p : orbit) {
    const Point2 xy = e.clamp({p.x, p.y});
    const double deviation = std::abs(p.z - f.nearest(xy));
    // Local Lipschitz estimate (largest node step / spacing) over two spacings.
    const double allowance = sample.error_bound + 2.0 * f.local_step(xy) + 1e-12;
    out.max_deviation = std::max(out.max_deviation, deviation);
    out.max_ratio = std::max(out.max_ratio, deviation / allowance);
    if (deviation > allowance) ++out.violations;
  }
  return out;
}

double edge_continuity_gap(const IfsSystem& system, const SurfaceSample& sample,
                           int samples_per_line) {
  const DataGrid& grid = system.grid();
  const Rect e = grid.domain();
  const HeightField& f = sample.heights;
  auto via = [&](CellIndex c, Point2 p) {
    const CellMaps& cm = system.cell(c);
    const Point2 pre = e.clamp(invert_map(cm.map, p));
    return cm.s(p) * (f.interpolate(pre) - cm.g(pre)) + cm.h(p);
  };
  double gap = 0.0;
  for (int alpha = 1; alpha < grid.n(); ++alpha) {
    for (int k = 0; k <= samples_per_line; ++k) {
      const Point2 p{grid.x(alpha), e.y0 + e.height() * k / samples_per_line};
      const int j = locate_cell(grid, p).j;
      gap = std::max(gap, std::abs(via({alpha, j}, p) - via({alpha + 1, j}, p)));
    }
  }
  for (int beta = 1; beta < grid.m(); ++beta) {
    for (int k = 0; k <= samples_per_line; ++k) {
      const Point2 p{e.x0 + e.width() * k / samples_per_line, grid.y(beta)};
      const int i = locate_cell(grid, p).i;
      gap = std::max(gap, std::abs(via({i, beta}, p) - via({i, beta + 1}, p)));
    }
  }
  return gap;
}

}  // namespace fractsurf
