// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fractsurf/config.hpp"
#include "fractsurf/dimension.hpp"
#include "fractsurf/exports.hpp"
#include "fractsurf/ifs_core.hpp"
#include "fractsurf/pipeline.hpp"

using namespace fractsurf;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const double kX[5] = {0, 0.25, 0.5, 0.75, 1};
const double kY[4] = {0, 1.0 / 3.0, 2.0 / 3.0, 1};
const double kZ[4][5] = {{0.3, 1.1, 0.2, 1.5, 2},
                         {0.3, 2, 1.8, 1.5, 2},
                         {3, 2, 3, 3.3, 3},
                         {2, 3, 2.5, 4, 4.5}};

// {a, b, c} for a t^2 + b t + c, one row per knot interval.
const double kQ[5][3][3] = {
    {{18, -6, 0.3}, {18, -9.9, 1.6}, {-18, 27, -7}},
    {{4.5, 1.2, 1.1}, {9, -9, 4}, {18, -27, 12}},
    {{8.1, 2.1, 0.2}, {9, -5.4, 2.6}, {-9, 13.5, -2}},
    // Leading coefficient +4.5; with -4.5 the last piece misses z(3,2) and z(3,3).
    {{9, -3, 1.5}, {9, -3.6, 1.7}, {4.5, -5.4, 4.9}},
    {{9, -3, 2}, {18, -15, 5}, {9, -10.5, 6}},
};
const double kR[4][4][3] = {
    {{6.4, 1.6, 0.3}, {-16, 8.4, 0}, {16, -14.8, 3.6}, {4.8, -6.4, 3.6}},
    {{8, 4.8, 0.3}, {-16, 11.2, 0.2}, {-9.6, 10.8, -1.2}, {4.8, -6.4, 3.6}},
    {{-32, 4, 3}, {32, -20, 5}, {3.2, -2.8, 3.6}, {-16, 26.8, -7.8}},
    {{32, -4, 2}, {-16, 10, 1.5}, {16, -14, 5.5}, {16, -26, 14.5}},
};

// Lower piece on shared knots.
double piecewise(const double (*pieces)[3], const double* knots, int count, double t) {
  int k = 0;
  while (k + 1 < count && t > knots[k + 1]) ++k;
  return (pieces[k][0] * t + pieces[k][1]) * t + pieces[k][2];
}

int node_of(double v, double lo, double hi, int r) {
  return static_cast<int>(std::lround((v - lo) / (hi - lo) * (r - 1)));
}

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Runs a criterion, turning any exception into a FAIL line.
void criterion(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& err) {
    report(id, false, std::string("exception: ") + err.what());
  }
}

struct Solved {
  JobConfig config;
  BuiltJob job;
  SurfaceSample sample;
  double seconds = 0.0;
};

Solved solve(const std::string& fixture) {
  Solved s{load_fixture(fixture), {}, {}, 0.0};
  const auto t0 = Clock::now();
  s.job = build_job(s.config);
  s.sample = solve_fixed_point(s.job.system, {s.config.solver.resolution, s.config.solver.tolerance,
                                              s.config.solver.max_iterations});
  s.seconds = seconds_since(t0);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  std::printf("acceptance run\n");
  const Solved ex2a = solve("example2a");
  const int R = ex2a.sample.heights.resolution();
  const HeightField& f = ex2a.sample.heights;

  criterion(1, [&] {
    double worst = 0.0;
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 3; ++b)
        worst = std::max(worst, std::abs(f.at(node_of(kX[a], 0, 1, R), node_of(kY[b], 0, 1, R)) - kZ[b][a]));
    report(1, worst <= 1e-5 && ex2a.seconds < 60.0,
           fmt("example2a R=%d: max knot error %.3g (tol 1e-5), build+solve %.2f s (limit 60 s)", R,
               worst, ex2a.seconds));
  });

  criterion(2, [&] {
    double worst = 0.0;
    for (int a = 0; a <= 4; ++a) {
      const int col = node_of(kX[a], 0, 1, R);
      for (int k = 0; k < 256; ++k) {
        const int b = static_cast<int>(std::lround(k * (R - 1) / 255.0));
        worst = std::max(worst, std::abs(f.at(col, b) - piecewise(kQ[a], kY, 3, f.y(b))));
      }
    }
    for (int b = 0; b <= 3; ++b) {
      const int row = node_of(kY[b], 0, 1, R);
      for (int k = 0; k < 256; ++k) {
        const int a = static_cast<int>(std::lround(k * (R - 1) / 255.0));
        worst = std::max(worst, std::abs(f.at(a, row) - piecewise(kR[b], kX, 4, f.x(a))));
      }
    }
    report(2, worst <= 1e-5,
           fmt("9 knot lines x 256 samples: max deviation from q/r %.3g (tol 1e-5)", worst));
  });

  criterion(3, [&] {
    double worst = 0.0;
    int max_iterations = 0;
    for (const BlendForm mode : {BlendForm::coons, BlendForm::explicit_polynomial}) {
      JobConfig cfg = load_fixture("example2a");
      for (auto& [cell, spec] : cfg.scaling) spec.coefficient = 0.0;
      cfg.blend.mode = mode;
      const BuiltJob job = build_job(cfg);
      const SurfaceSample s = solve_fixed_point(job.system, {193, 1e-12, 1000});
      max_iterations = std::max(max_iterations, s.iterations);
      // h patchwork evaluated directly, cell by cell.
      const HeightField& h = s.heights;
      for (int a = 0; a < h.resolution(); ++a) {
        for (int b = 0; b < h.resolution(); ++b) {
          const Point2 p{h.x(a), h.y(b)};
          const CellIndex c = locate_cell(job.system.grid(), p);
          double expected = 0.0;
          const auto table = cfg.blend.tables.find(c);
          if (mode == BlendForm::explicit_polynomial && !(c == CellIndex{4, 1})) {
            for (const MonomialTerm& t : table->second)
              expected += t.coefficient * std::pow(p.x, t.x_power) * std::pow(p.y, t.y_power);
          } else {
            expected = job.system.cell(c).h(p);
          }
          worst = std::max(worst, std::abs(h.at(a, b) - expected));
        }
      }
    }
    report(3, max_iterations == 1 && worst <= 1e-12,
           fmt("s = 0, Coons and explicit blends: %d T-application(s), max |f - h| %.3g (tol 1e-12)",
               max_iterations, worst));
  });

  criterion(4, [&] {
    const Solved ex2b = solve("example2b-sin");
    const ResidualReport ra = self_affinity_residual(ex2a.job.system, ex2a.sample, 10000, 4);
    const ResidualReport rb = self_affinity_residual(ex2b.job.system, ex2b.sample, 10000, 4);
    report(4, ra.violations == 0 && rb.violations == 0,
           fmt("10^4 points: example2a max residual %.3g (worst ratio to allowance %.3f), "
               "example2b-sin %.3g (ratio %.3f); allowance 3 x (bound + slack)",
               ra.max_residual, ra.max_ratio, rb.max_residual, rb.max_ratio));
  });

  criterion(5, [&] {
    const double cs = 2300.0 / 2304.0;
    const auto& d = ex2a.sample.differences;
    double worst = 0.0;
    for (std::size_t k = 3; k < d.size(); ++k)
      if (d[k - 1] > 0.0) worst = std::max(worst, d[k] / d[k - 1]);
    const double certified = ex2a.job.system.certificate().vertical_contraction;
    report(5, worst <= cs + 0.01 && std::abs(certified - cs) < 1e-12,
           fmt("example2a: max successive ratio after iteration 3 is %.6f over %zu iterations "
               "(limit c_s + 0.01 = %.6f, certified c_s %.6f)",
               worst, d.size(), cs + 0.01, certified));
  });

  criterion(6, [&] {
    int fields = 0;
    double worst_gap = 0.0;
    double worst_sup = 0.0;
    for (const char* name : {"example2a", "example2b-sin"}) {
      const BuiltJob job = build_job(load_fixture(name));
      for (const CellMaps& cm : job.system.cells()) {
        const Rect& r = cm.s.rect();
        const double q = r.width() * r.height() / 4.0;
        const double analytic = std::abs(cm.s.coefficient()) * q * q;
        worst_gap = std::max({worst_gap, std::abs(analytic - sampled_sup(cm.s, 512)),
                              std::abs(analytic - cm.s.sup_abs())});
        worst_sup = std::max(worst_sup, cm.s.sup_abs());
        ++fields;
      }
    }
    report(6, fields == 24 && worst_sup < 1.0 && worst_gap <= 1e-6,
           fmt("%d fields: max certified sup|s| %.6f (< 1), max analytic vs 512^2 sampled gap %.3g "
               "(tol 1e-6)",
               fields, worst_sup, worst_gap));
  });

  criterion(7, [&] {
    std::string detail;
    bool pass = true;
    for (const char* name : {"flat", "bilinear"}) {
      const Solved s = solve(name);
      DimensionOptions o;
      o.levels = s.config.dimension.levels;
      o.epsilon_fraction = s.config.dimension.epsilon_fraction;
      const DimensionReport d = analyse_dimension(s.job.system, s.sample, o);
      pass = pass && d.counts.size() == 5 && std::abs(d.estimate() - 2.0) <= 0.05;
      detail += fmt("%s %.4f over %zu scales; ", name, d.estimate(), d.counts.size());
    }
    report(7, pass, detail + "target 2 +/- 0.05");
  });

  criterion(8, [&] {
    const auto t0 = Clock::now();
    const Solved s = solve("band2x2");
    DimensionOptions o;
    o.levels = s.config.dimension.levels;
    o.epsilon_fraction = s.config.dimension.epsilon_fraction;
    const DimensionReport d = analyse_dimension(s.job.system, s.sample, o);
    const double seconds = seconds_since(t0);
    double sum_bar = 0.0, sum_under = 0.0;
    for (double v : d.s_bar) sum_bar += v;
    for (double v : d.s_underbar) sum_under += v;
    const double upper = 1.0 + std::log2(sum_bar);
    const double lower = 1.0 + std::log2(sum_under);
    const bool band_ok = d.applicability.applicable() && d.bounds.kind == BoundsCase::bounds &&
                         std::abs(d.bounds.upper - upper) < 1e-12 &&
                         std::abs(d.bounds.lower - lower) < 1e-12;
    const double e = d.estimate();
    const bool in_band = e >= d.bounds.lower - 0.15 && e <= d.bounds.upper + 0.15;
    report(8, band_ok && in_band && seconds < 300.0,
           fmt("band2x2 R=%d: estimate %.4f over %zu scales, band [%.4f, %.4f] from sums %.4f / %.4f, "
               "accepted [%.4f, %.4f]; %.1f s (limit 300 s)",
               s.sample.heights.resolution(), e, d.counts.size(), d.bounds.lower, d.bounds.upper,
               sum_under, sum_bar, d.bounds.lower - 0.15, d.bounds.upper + 0.15, seconds));
  });

  criterion(9, [&] {
    const auto orbit = chaos_game(ex2a.job.system, 100000, 1);
    const OrbitAgreement a = chaos_agreement(ex2a.job.system, ex2a.sample, orbit);
    report(9, a.points == 100000 && a.violations == 0,
           fmt("example2a, 10^5 points, seed 1: %d violations, max deviation %.3g, "
               "worst ratio to allowance %.3f",
               a.violations, a.max_deviation, a.max_ratio));
  });

  criterion(10, [&] {
    int round_trips = 0, identical = 0;
    const auto names = fixture_names();
    const fs::path root = fs::temp_directory_path() / "fractsurf_acceptance";
    for (const std::string& name : names) {
      const JobConfig cfg = load_fixture(name);
      if (parse_config(serialize_config(cfg)) == cfg) ++round_trips;
      std::ostringstream log;
      const fs::path a = root / (name + "_a"), b = root / (name + "_b");
      const RunResult ra = run_pipeline(cfg, Command::report, a, log);
      const RunResult rb = run_pipeline(cfg, Command::report, b, log);
      bool same = ra.exit_code == kExitOk && rb.exit_code == kExitOk;
      for (const char* file : {"heightmap.csv", "dimension.csv", "points.xyz", "dimension.kv"})
        same = same && !slurp(a / file).empty() && slurp(a / file) == slurp(b / file);
      if (same) ++identical;
      if (ra.exit_code != kExitOk) std::printf("  %s: %s", name.c_str(), log.str().c_str());
    }
    fs::remove_all(root);
    const int total = static_cast<int>(names.size());
    report(10, round_trips == total && identical == total,
           fmt("%d/%d fixtures round-trip through JSON, %d/%d give byte-identical CSV/xyz/kv outputs",
               round_trips, total, identical, total));
  });

  std::printf("%s: %d criterion failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
