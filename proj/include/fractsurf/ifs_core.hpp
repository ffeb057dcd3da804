#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fractsurf/boundary_network.hpp"
#include "fractsurf/grid_model.hpp"
#include "fractsurf/scaling_fields.hpp"

namespace fractsurf {

struct ContractionCertificate {
  double map_contraction = 0.0;     // max over cells of the taxicab factor of L_ij
  double q_lipschitz = 0.0;         // max over cells of the Lipschitz bound of Q_ij
  double vertical_contraction = 0.0;  // c_s = max over cells of sup |s_ij|

  // Upper end of the admissible theta range (1 - c_L) / L_Q; +inf when L_Q = 0.
  double theta_upper() const {
    if (q_lipschitz == 0.0) return std::numeric_limits<double>::infinity();
    return (1.0 - map_contraction) / q_lipschitz;
  }
};

// Everything that defines W_ij for one cell.
struct CellMaps {
  DomainMap map;
  ScalingField s;
  FreeField g;
  PatchBlend h;
  QField q;
};

/// The assembled system {W_ij}, W_ij(x, y, z) = (L_ij(x, y), F_ij(x, y, z)).
class IfsSystem {
 public:
  const DataGrid& grid() const { return grid_; }
  const BoundaryCurves& curves() const { return curves_; }
  std::span<const CellMaps> cells() const { return cells_; }
  const CellMaps& cell(CellIndex c) const {
    return cells_[static_cast<std::size_t>(grid_.cell_offset(c))];
  }
  const ContractionCertificate& certificate() const { return certificate_; }

  /// F_ij(x, y, z) = s_ij(L_ij(x, y)) z + Q_ij(x, y).
  double eval_F(CellIndex c, double x, double y, double z) const;
  Point3 apply_W(CellIndex c, Point3 p) const;

 private:
  friend IfsSystem assemble_ifs(DataGrid, BoundaryCurves, std::vector<DomainMap>,
                                std::vector<ScalingField>, std::vector<FreeField>,
                                std::vector<PatchBlend>);
  DataGrid grid_;
  BoundaryCurves curves_;
  std::vector<CellMaps> cells_;
  ContractionCertificate certificate_;
};

/// All per-cell vectors are in cell_offset order. Rejects fields whose
/// certified sup |s| is not below 1 (MagnitudeViolation), images that do not
/// tile E (InvalidGrid) and mismatched cell tags (std::invalid_argument).
IfsSystem assemble_ifs(DataGrid grid, BoundaryCurves curves, std::vector<DomainMap> maps,
                       std::vector<ScalingField> scaling, std::vector<FreeField> free_fields,
                       std::vector<PatchBlend> blends);

/// Uniform R x R node grid over a rectangle; values stored row by row in y.
class HeightField {
 public:
  HeightField() = default;
  HeightField(int resolution, const Rect& domain);

  int resolution() const { return resolution_; }
  const Rect& domain() const { return domain_; }
  double x(int a) const { return xs_[static_cast<std::size_t>(a)]; }
  double y(int b) const { return ys_[static_cast<std::size_t>(b)]; }

  double& at(int a, int b) { return values_[index(a, b)]; }
  double at(int a, int b) const { return values_[index(a, b)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // Replaces node coordinates that coincide with knots by the exact knot value.
  void snap_to(std::span<const double> x_knots, std::span<const double> y_knots);

  /// Bilinear interpolation; p is clamped to the domain.
  double interpolate(Point2 p) const;
  double nearest(Point2 p) const;
  /// max - min of the nodes within `radius` node spacings of p.
  double local_oscillation(Point2 p, int radius = 2) const;
  /// Largest difference between neighbouring nodes in the same window.
  double local_step(Point2 p, int radius = 2) const;

  double min() const;
  double max() const;

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(b) * static_cast<std::size_t>(resolution_) +
           static_cast<std::size_t>(a);
  }
  int resolution_ = 0;
  Rect domain_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> values_;
};

/// Throws ConfigurationError unless every knot lies on a node line and
/// R >= 4 max(n, m) + 1.
void check_resolution(const DataGrid& grid, int resolution);

/// The discretised Read-Bajraktarevic operator (T phi)(p) =
/// s_ij(p) (phi(L_ij^{-1} p) - g_ij(L_ij^{-1} p)) + h_ij(p) on a knot-aligned
/// node grid, with phi pulled back by bilinear interpolation.
///
/// Everything that does not depend on phi is evaluated once at construction.
class TOperator {
 public:
  TOperator(const IfsSystem& system, int resolution);

  HeightField apply(const HeightField& phi) const;
  // The initial iterate: Coons patchwork of the boundary curves.
  HeightField initial() const;
  // The h patchwork, i.e. T applied with s = 0.
  HeightField blend_patchwork() const;

  int resolution() const { return resolution_; }
  // True when every pulled-back node lands on a node, so the pull-back is exact.
  bool pullback_exact() const { return pullback_exact_; }
  // Largest |s| over the nodes; the contraction factor of the discrete operator.
  double node_contraction() const { return node_contraction_; }

 private:
  struct Stencil {
    std::uint32_t a0;
    std::uint32_t b0;
    double wx;
    double wy;
  };
  int resolution_;
  HeightField layout_;
  std::vector<double> s_;
  std::vector<double> g_;
  std::vector<double> h_;
  std::vector<double> coons_;
  std::vector<Stencil> stencil_;
  bool pullback_exact_ = true;
  double node_contraction_ = 0.0;
};

HeightField apply_T(const IfsSystem& system, const HeightField& phi);

struct SolveOptions {
  int resolution = 257;
  double tolerance = 1e-6;
  int max_iterations = 100000;
};

struct SurfaceSample {
  HeightField heights;
  int iterations = 0;
  // c_s / (1 - c_s) * last sup-difference: bound on the distance to the fixed point.
  double error_bound = 0.0;
  double contraction = 0.0;  // the c_s used in the bound
  std::vector<double> differences;  // sup |phi_k - phi_{k-1}| per iteration
  bool pullback_exact = false;
};

/// Iterates T from the Coons patchwork until the a-posteriori bound is <= tol.
/// Throws ConvergenceError (carrying the last bound) after max_iterations.
SurfaceSample solve_fixed_point(const IfsSystem& system, const SolveOptions& options);

/// Max difference at common nodes between solutions at R and 2R - 1. Zero
/// (without solving twice) when the pull-back is exact.
double estimate_discretization_bias(const IfsSystem& system, const SolveOptions& options);

/// Random orbit under uniformly chosen W_ij, started on the graph at
/// (x_0, y_0, z_00), after a 100-step burn-in. Deterministic in `seed`.
std::vector<Point3> chaos_game(const IfsSystem& system, std::size_t point_count, std::uint64_t seed);

struct MetricReport {
  double theta_upper = 0.0;   // (1 - c_L) / L_Q
  // F also varies with (x, y) through s(L(x, y)) z, which adds Lip(s o L) |z|
  // to the Lipschitz constant in (x, y). Over the sampled z band:
  double band_lipschitz = 0.0;    // max over cells of L_Q + Lip(s o L) max |z|
  double band_theta_upper = 0.0;  // (1 - c_L) / band_lipschitz
  double theta = 0.0;             // theta used for the sampled check
  bool theta_admissible = false;  // 0 < theta < band_theta_upper
  double sampled_factor = 0.0;  // max rho(W p, W p') / rho(p, p') observed
  Interval z_band;              // heights sampled
  int pairs = 0;
};

/// Admissible theta range plus a sampled check of the contraction of every
/// W_ij in rho_theta at `theta` (default: midpoint of the band-aware range,
/// or 1 when all theta are admissible). Heights are drawn from a band around
/// the data. Throws CertificationError when an admissible theta yields a
/// sampled factor >= 1.
MetricReport certify_metric(const IfsSystem& system, std::optional<double> theta = std::nullopt,
                            int pairs = 10000, std::uint64_t seed = 1);

struct ResidualReport {
  double max_residual = 0.0;
  double max_ratio = 0.0;  // max of residual / allowance
  int points = 0;
  int violations = 0;
};

/// Checks f(L_ij p) = s_ij(L_ij p) (f(p) - g_ij(p)) + h_ij(L_ij p) on random
/// points p for every cell, with f the interpolated sample. The allowance per
/// point is 3 * (error bound + interpolation slack), the slack being the local
/// node oscillation around the two evaluation points.
ResidualReport self_affinity_residual(const IfsSystem& system, const SurfaceSample& sample,
                                      int points, std::uint64_t seed);

struct OrbitAgreement {
  double max_deviation = 0.0;
  double max_ratio = 0.0;  // max of deviation / allowance
  int points = 0;
  int violations = 0;
};

/// Compares chaos-game orbit heights with the sample at the nearest node. The
/// allowance per point is the error bound plus two node spacings times the
/// local Lipschitz estimate, i.e. twice the largest nearby node step.
OrbitAgreement chaos_agreement(const IfsSystem& system, const SurfaceSample& sample,
                               std::span<const Point3> orbit);

/// Largest difference between T f evaluated through the two cells adjacent to
/// each interior knot line.
double edge_continuity_gap(const IfsSystem& system, const SurfaceSample& sample,
                           int samples_per_line = 1024);

}  // namespace fractsurf
