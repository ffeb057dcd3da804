#include "fractsurf/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "fractsurf/dimension.hpp"
#include "fractsurf/errors.hpp"
#include "fractsurf/exports.hpp"

namespace fractsurf {

namespace {

std::string cell_label(CellIndex c) { return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + ")"; }

ScalingField build_scaling(const ScalingSpec& spec, CellIndex c, const Rect& rect) {
  switch (spec.form) {
    case ScalingForm::separable_quartic:
      return make_separable_quartic(c, rect, spec.coefficient);
    case ScalingForm::polynomial_product:
      return build_product_field(c, rect, parse_expression(spec.psi), spec.exponents,
                                  parse_expression(spec.outer));
    case ScalingForm::expression:
      return make_expression_field(c, rect, parse_expression(spec.expression));
  }
  throw std::logic_error("unknown scaling form");
}

KeyValues certificate_values(const BuiltJob& job, const MetricReport& metric) {
  const IfsSystem& sys = job.system;
  const ContractionCertificate& cert = sys.certificate();
  KeyValues kv;
  auto add = [&](std::string key, std::string value) { kv.emplace_back(std::move(key), std::move(value)); };
  add("n", std::to_string(sys.grid().n()));
  add("m", std::to_string(sys.grid().m()));
  add("map_contraction", format_number(cert.map_contraction));
  add("q_lipschitz", format_number(cert.q_lipschitz));
  add("vertical_contraction", format_number(cert.vertical_contraction));
  add("theta_upper", format_number(cert.theta_upper()));
  add("band_lipschitz", format_number(metric.band_lipschitz));
  add("band_theta_upper", format_number(metric.band_theta_upper));
  add("z_band", format_number(metric.z_band.lo) + "," + format_number(metric.z_band.hi));
  add("theta", format_number(metric.theta));
  add("theta_admissible", metric.theta_admissible ? "true" : "false");
  add("sampled_rho_factor", format_number(metric.sampled_factor));
  add("sampled_pairs", std::to_string(metric.pairs));
  for (std::size_t k = 0; k < sys.cells().size(); ++k) {
    const CellMaps& cm = sys.cells()[k];
    const MagnitudeCertificate& mc = cm.s.certificate();
    const std::string prefix = "cell" + cell_key(cm.map.cell) + ".";
    add(prefix + "s_form", to_string(cm.s.form()));
    add(prefix + "sup_abs", format_number(mc.sup_abs));
    add(prefix + "sampled_sup", format_number(mc.sampled_sup));
    add(prefix + "witness", format_number(mc.witness.x) + "," + format_number(mc.witness.y));
    add(prefix + "analytic", mc.analytic ? "true" : "false");
    add(prefix + "q_lipschitz", format_number(cm.q.lipschitz()));
    const BlendVerdict& v = job.verdicts[k];
    add(prefix + "blend", to_string(v.used));
    if (v.requested != v.used) {
      add(prefix + "blend_rejected", "edge error " + format_number(v.edge_error) + " on " + v.edge);
    }
  }
  return kv;
}

void write_file(const std::filesystem::path& path, const std::string& content, RunResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigurationError("failed writing " + path.string());
  result.files.push_back(path);
}

double max_knot_error(const DataGrid& grid, const HeightField& f) {
  double worst = 0.0;
  for (int i = 0; i <= grid.n(); ++i) {
    for (int j = 0; j <= grid.m(); ++j) {
      worst = std::max(worst, std::abs(f.nearest({grid.x(i), grid.y(j)}) - grid.z(i, j)));
    }
  }
  return worst;
}

void run(const JobConfig& config, Command command, const std::filesystem::path& out_dir,
         std::ostream& log, RunResult& result) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const BuiltJob job = build_job(config);
  const IfsSystem& sys = job.system;
  const MetricReport metric = certify_metric(sys);

  log << "grid " << sys.grid().n() << " x " << sys.grid().m() << ", c_s = "
      << format_number(sys.certificate().vertical_contraction) << ", c_L = "
      << format_number(sys.certificate().map_contraction) << ", L_Q = "
      << format_number(sys.certificate().q_lipschitz) << "\n";
  log << "theta in (0, " << format_number(metric.theta_upper) << "), on the z band (0, "
      << format_number(metric.band_theta_upper) << "), sampled rho factor "
      << format_number(metric.sampled_factor) << " at theta = " << format_number(metric.theta) << "\n";
  for (const BlendVerdict& v : job.verdicts) {
    if (v.requested != v.used) {
      log << "blend " << cell_label(v.cell) << ": explicit table rejected (edge error "
          << format_number(v.edge_error) << " on " << v.edge << "), Coons patch used\n";
    }
  }
  if (command == Command::validate) {
    log << "validate: all certifications passed\n";
    return;
  }

  std::filesystem::create_directories(out_dir);
  if (command == Command::build || command == Command::report) {
    std::ostringstream kv;
    write_key_values(kv, certificate_values(job, metric));
    write_file(out_dir / "certificate.txt", kv.str(), result);
  }
  if (command == Command::build) return;

  SolveOptions options{config.solver.resolution, config.solver.tolerance, config.solver.max_iterations};
  const SurfaceSample sample = solve_fixed_point(sys, options);
  const double knot_error = max_knot_error(sys.grid(), sample.heights);
  log << "solved at R = " << options.resolution << " in " << sample.iterations
      << " iterations, a-posteriori bound " << format_number(sample.error_bound)
      << ", max knot error " << format_number(knot_error) << "\n";

  std::vector<Point3> orbit;
  if (command == Command::surface || command == Command::report) {
    std::ostringstream csv;
    write_heightmap_csv(csv, sample.heights);
    write_file(out_dir / "heightmap.csv", csv.str(), result);
    std::ostringstream pgm;
    write_pgm(pgm, sample.heights);
    write_file(out_dir / "heightmap.pgm", pgm.str(), result);
    orbit = chaos_game(sys, config.chaos.points, config.chaos.seed);
    std::ostringstream xyz;
    write_xyz(xyz, orbit);
    write_file(out_dir / "points.xyz", xyz.str(), result);
  }

  std::optional<DimensionReport> dim;
  if (command == Command::dimension || command == Command::report) {
    DimensionOptions dopt;
    dopt.epsilon_fraction = config.dimension.epsilon_fraction;
    dopt.levels = config.dimension.levels;
    dopt.cross_check_points = config.dimension.cross_check_points;
    dopt.seed = config.chaos.seed;
    dim = analyse_dimension(sys, sample, dopt);
    std::ostringstream csv;
    write_counts_csv(csv, dim->counts);
    write_file(out_dir / "dimension.csv", csv.str(), result);
    std::ostringstream kv;
    write_key_values(kv, dimension_values(*dim));
    write_file(out_dir / "dimension.kv", kv.str(), result);
    write_file(out_dir / "dimension.txt", dimension_text(*dim), result);
    log << "dimension estimate " << format_number(dim->estimate());
    if (dim->applicability.applicable()) {
      log << ", bounds [" << format_number(dim->bounds.lower) << ", "
          << format_number(dim->bounds.upper) << "]\n";
    } else {
      log << " (no theoretical band)\n";
    }
  }

  if (command == Command::report) {
    const ResidualReport residual = self_affinity_residual(sys, sample, 10000, config.chaos.seed);
    const OrbitAgreement agreement = chaos_agreement(sys, sample, orbit);
    const double seam = edge_continuity_gap(sys, sample);
    std::ostringstream s;
    s << "fractsurf report: " << (config.name.empty() ? "(unnamed)" : config.name) << "\n\n";
    s << "grid: " << sys.grid().n() << " x " << sys.grid().m() << " cells\n";
    s << "vertical contraction c_s: " << format_number(sys.certificate().vertical_contraction) << "\n";
    s << "map contraction c_L: " << format_number(sys.certificate().map_contraction) << "\n";
    s << "Q Lipschitz bound L_Q: " << format_number(sys.certificate().q_lipschitz) << "\n";
    s << "admissible theta: (0, " << format_number(metric.theta_upper) << "); with heights in ["
      << format_number(metric.z_band.lo) << ", " << format_number(metric.z_band.hi) << "]: (0, "
      << format_number(metric.band_theta_upper) << ")\n";
    s << "sampled rho_theta factor: " << format_number(metric.sampled_factor) << " at theta "
      << format_number(metric.theta) << "\n";
    for (const BlendVerdict& v : job.verdicts) {
      if (v.requested != v.used) {
        s << "blend " << cell_label(v.cell) << ": explicit table rejected (edge error "
          << format_number(v.edge_error) << " on " << v.edge << "), Coons patch used\n";
      }
    }
    s << "\nsolver: R = " << options.resolution << ", tol = " << format_number(options.tolerance)
      << ", " << sample.iterations << " iterations\n";
    s << "a-posteriori bound: " << format_number(sample.error_bound) << "\n";
    s << "pull-back exact on nodes: " << (sample.pullback_exact ? "yes" : "no") << "\n";
    s << "max knot error: " << format_number(knot_error) << "\n";
    s << "self-affinity residual: max " << format_number(residual.max_residual) << ", worst ratio "
      << format_number(residual.max_ratio) << " of allowance over " << residual.points << " points\n";
    s << "chaos game: " << agreement.points << " points, max deviation "
      << format_number(agreement.max_deviation) << ", worst ratio " << format_number(agreement.max_ratio)
      << "\n";
    s << "edge continuity gap: " << format_number(seam) << "\n";
    if (dim) {
      s << "\n" << dimension_text(*dim);
    }
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
    log << "report done in " << seconds << " s\n";
    write_file(out_dir / "summary.txt", s.str(), result);
    write_file(out_dir / "config.json", serialize_config(config), result);
  }
}

}  // namespace

BuiltJob build_job(const JobConfig& config) {
  const DataGrid grid = resolve_grid(config.grid);
  if (auto issues = check_against_grid(config, grid); !issues.empty()) {
    throw ConfigParseError(std::move(issues));
  }
  std::vector<Orientation> orientations;
  if (!config.orientations.empty()) {
    for (const CellIndex c : grid.cells()) {
      const auto it = config.orientations.find(c);
      orientations.push_back(it == config.orientations.end() ? Orientation{} : it->second);
    }
  }
  std::vector<DomainMap> maps = build_domain_maps(grid, orientations);
  BoundaryCurves curves = build_boundary_curves(
      grid, config.curve_method, config.curve_method == CurveMethod::linear ? nullptr : &config.pieces);

  const Rect domain = grid.domain();
  std::map<std::string, FreeField> free_cache;
  std::vector<ScalingField> scaling;
  std::vector<FreeField> free_fields;
  std::vector<PatchBlend> blends;
  std::vector<BlendVerdict> verdicts;
  for (const CellIndex c : grid.cells()) {
    const Rect rect = grid.cell_rect(c);
    scaling.push_back(build_scaling(*config.scaling_for(c), c, rect));

    const std::string& g = config.g.for_cell(c);
    auto it = free_cache.find(g);
    if (it == free_cache.end()) it = free_cache.emplace(g, make_free_field(g, domain, config.g.lipschitz)).first;
    free_fields.push_back(it->second);

    BlendVerdict verdict;
    verdict.cell = c;
    verdict.requested = config.blend.mode;
    if (config.blend.mode == BlendForm::coons) {
      blends.push_back(build_coons_blend(grid, curves, c));
    } else {
      try {
        blends.push_back(load_explicit_blend(c, rect, config.blend.tables.at(c), curves));
        verdict.used = BlendForm::explicit_polynomial;
      } catch (const BlendValidationError& err) {
        if (!config.blend.fallback_to_coons) throw;
        verdict.edge_error = err.value();
        // The message names the curve; keep only that part for the report.
        const std::string what = err.what();
        const std::string marker = "boundary curve ";
        const auto pos = what.find(marker);
        verdict.edge = pos == std::string::npos
                           ? what
                           : what.substr(pos + marker.size(), what.find(':', pos) - pos - marker.size());
        blends.push_back(build_coons_blend(grid, curves, c));
      }
    }
    verdicts.push_back(verdict);
  }
  IfsSystem sys = assemble_ifs(grid, std::move(curves), std::move(maps), std::move(scaling),
                               std::move(free_fields), std::move(blends));
  return {std::move(sys), std::move(verdicts)};
}

std::optional<Command> parse_command(std::string_view name) {
  if (name == "validate") return Command::validate;
  if (name == "build") return Command::build;
  if (name == "surface") return Command::surface;
  if (name == "dimension") return Command::dimension;
  if (name == "report") return Command::report;
  return std::nullopt;
}

const char* to_string(Command command) {
  switch (command) {
    case Command::validate: return "validate";
    case Command::build: return "build";
    case Command::surface: return "surface";
    case Command::dimension: return "dimension";
    case Command::report: return "report";
  }
  return "?";
}

RunResult run_pipeline(const JobConfig& config, Command command,
                       const std::filesystem::path& out_dir, std::ostream& log) {
  RunResult result;
  auto witness = [](const WitnessError& err) {
    return " [witness (" + format_number(err.witness().x) + ", " + format_number(err.witness().y) +
           "), value " + format_number(err.value()) + "]";
  };
  try {
    run(config, command, out_dir, log, result);
  } catch (const ConfigurationError& err) {
    log << "configuration error: " << err.what() << "\n";
    result.exit_code = kExitConfiguration;
  } catch (const InvalidGrid& err) {
    log << "invalid grid: " << err.what() << "\n";
    result.exit_code = kExitConfiguration;
  } catch (const MagnitudeViolation& err) {
    log << "magnitude violation: " << err.what() << witness(err) << "\n";
    result.exit_code = kExitCertification;
  } catch (const WitnessError& err) {
    log << "certification failure: " << err.what() << witness(err) << "\n";
    result.exit_code = kExitCertification;
  } catch (const CurveError& err) {
    log << "boundary curve error: " << err.what() << "\n";
    result.exit_code = kExitCertification;
  } catch (const CompatibilityError& err) {
    log << "compatibility error: " << err.what() << "\n";
    result.exit_code = kExitCertification;
  } catch (const CertificationError& err) {
    log << "certification failure: " << err.what() << "\n";
    result.exit_code = kExitCertification;
  } catch (const ConvergenceError& err) {
    log << "no convergence: " << err.what() << "\n";
    result.exit_code = kExitConvergence;
  } catch (const std::exception& err) {
    log << "error: " << err.what() << "\n";
    result.exit_code = kExitFailure;
  }
  return result;
}

}  // namespace fractsurf
