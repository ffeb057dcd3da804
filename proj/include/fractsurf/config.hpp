#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fractsurf/boundary_network.hpp"
#include "fractsurf/errors.hpp"
#include "fractsurf/grid_model.hpp"
#include "fractsurf/scaling_fields.hpp"

namespace fractsurf {

struct GridSpec {
  enum class Source { inline_rows, file, fixture };
  Source source = Source::inline_rows;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::vector<double>> rows;  // rows[j][i], one per y knot
  std::string path;                       // Source::file
  std::string fixture;                    // Source::fixture

  bool operator==(const GridSpec&) const = default;
};

struct ScalingSpec {
  ScalingForm form = ScalingForm::separable_quartic;
  double coefficient = 0.0;  // separable_quartic
  std::string psi = "1";     // polynomial_product
  EdgeExponents exponents;
  std::string outer = "t";
  std::string expression;    // expression

  bool operator==(const ScalingSpec&) const = default;
};

struct BlendSpec {
  BlendForm mode = BlendForm::coons;
  // With explicit tables, a table that fails validation either aborts the job
  // or is replaced by the Coons patch of its cell (the verdict is reported).
  bool fallback_to_coons = false;
  std::map<CellIndex, std::vector<MonomialTerm>> tables;

  bool operator==(const BlendSpec&) const = default;
};

struct FreeFieldSpec {
  std::string expression = "0";
  std::map<CellIndex, std::string> cells;  // per-cell overrides
  std::optional<double> lipschitz;

  const std::string& for_cell(CellIndex c) const {
    const auto it = cells.find(c);
    return it == cells.end() ? expression : it->second;
  }
  bool operator==(const FreeFieldSpec&) const = default;
};

struct SolverSpec {
  int resolution = 257;
  double tolerance = 1e-6;
  int max_iterations = 100000;

  bool operator==(const SolverSpec&) const = default;
};

struct DimensionSpec {
  int levels = 0;  // 0: down to 8 node spacings per box
  double epsilon_fraction = 1.0 / 64.0;
  std::uint64_t cross_check_points = 0;

  bool operator==(const DimensionSpec&) const = default;
};

struct ChaosSpec {
  std::uint64_t points = 100000;
  std::uint64_t seed = 1;

  bool operator==(const ChaosSpec&) const = default;
};

/// A complete job description.
struct JobConfig {
  std::string name;
  GridSpec grid;
  std::map<CellIndex, Orientation> orientations;  // cells not listed keep (+1, +1)
  std::optional<ScalingSpec> scaling_default;
  std::map<CellIndex, ScalingSpec> scaling;
  CurveMethod curve_method = CurveMethod::linear;
  CurvePieces pieces;
  BlendSpec blend;
  FreeFieldSpec g;
  SolverSpec solver;
  DimensionSpec dimension;
  ChaosSpec chaos;
  std::string output_dir = "out";

  // Spec for cell c: the per-cell entry, else the default.
  const ScalingSpec* scaling_for(CellIndex c) const;

  bool operator==(const JobConfig&) const = default;
};

struct ConfigIssue {
  std::string path;  // e.g. "scaling.cells.2,2.c"
  std::string message;
};

/// Every problem found in a document, not just the first.
class ConfigParseError : public ConfigurationError {
 public:
  explicit ConfigParseError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses and validates a JSON job document. A top-level "fixture" key loads a
/// built-in configuration; the other top-level sections then replace the
/// fixture's sections wholesale.
/// Throws ConfigParseError listing all issues.
JobConfig parse_config(const std::string& text);

/// Canonical JSON for a configuration; parse_config(serialize_config(c)) == c.
std::string serialize_config(const JobConfig& config);

/// Issues that need the resolved grid: missing or stray cells, knot alignment
/// of the solver resolution, piece counts. Empty when the config is usable.
std::vector<ConfigIssue> check_against_grid(const JobConfig& config, const DataGrid& grid);

/// Plain-text grid: first line the x knots, second line the y knots, then one
/// line of heights per y knot. Blank lines and '#' comments are ignored;
/// values may be separated by spaces, tabs or commas. Throws InvalidGrid.
DataGrid parse_grid_text(const std::string& text);
std::string format_grid_text(const DataGrid& grid);

/// Grid of the config, loading files or fixtures as needed. Throws InvalidGrid
/// or ConfigurationError.
DataGrid resolve_grid(const GridSpec& spec);

std::vector<std::string> fixture_names();
/// Throws ConfigurationError for unknown names.
JobConfig load_fixture(const std::string& name);

/// "i,j" keys used for per-cell tables.
std::string cell_key(CellIndex c);

}  // namespace fractsurf
