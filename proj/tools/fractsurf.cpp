// fractsurf: build fractal interpolation surfaces from a job config.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fractsurf/config.hpp"
#include "fractsurf/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace fractsurf;

  CLI::App app{"Fractal interpolation surfaces with boundary-vanishing scaling functions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string fixture;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  std::optional<double> tol;

  const char* descriptions[][2] = {
      {"validate", "check the configuration and certify every component"},
      {"build", "write the IFS certificate"},
      {"surface", "solve the fixed point; write heightmap CSV, PGM and chaos-game points"},
      {"dimension", "solve and write the box-counting dimension report"},
      {"report", "everything, plus a summary"},
  };
  for (const auto& [name, text] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--config", config_path, "job config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--fixture", fixture, "built-in job: example2a, example2b-sin, flat, bilinear, band2x2");
    sub->add_option("--out", out_dir, "output directory (default: the config's output.dir)");
    sub->add_option("--seed", seed, "chaos-game seed");
    sub->add_option("--resolution", resolution, "solver resolution R (R x R nodes)");
    sub->add_option("--tol", tol, "solver tolerance on the a-posteriori bound");
  }
  app.add_subcommand("fixtures", "list the built-in jobs");

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  if (sub->get_name() == "fixtures") {
    for (const std::string& name : fixture_names()) std::cout << name << "\n";
    return kExitOk;
  }

  JobConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::ostringstream text;
      text << in.rdbuf();
      config = parse_config(text.str());
      if (!fixture.empty()) {
        std::cerr << "--config and --fixture are mutually exclusive\n";
        return kExitConfiguration;
      }
    } else if (!fixture.empty()) {
      config = load_fixture(fixture);
    } else {
      std::cerr << "need --config or --fixture\n";
      return kExitConfiguration;
    }
  } catch (const ConfigurationError& err) {
    std::cerr << err.what() << "\n";
    return kExitConfiguration;
  }

  if (seed) config.chaos.seed = *seed;
  if (resolution) config.solver.resolution = *resolution;
  if (tol) {
    if (!(*tol > 0)) {
      std::cerr << "--tol must be > 0\n";
      return kExitConfiguration;
    }
    config.solver.tolerance = *tol;
  }
  const std::string dir = out_dir.empty() ? config.output_dir : out_dir;

  const Command command = *parse_command(sub->get_name());
  const RunResult result = run_pipeline(config, command, dir, std::cerr);
  for (const auto& path : result.files) std::cout << path.string() << "\n";
  return result.exit_code;
}
