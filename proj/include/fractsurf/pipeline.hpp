#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fractsurf/config.hpp"
#include "fractsurf/ifs_core.hpp"

namespace fractsurf {

// What happened to one cell's blend when the job was built.
struct BlendVerdict {
  CellIndex cell;
  BlendForm requested = BlendForm::coons;
  BlendForm used = BlendForm::coons;
  double edge_error = 0.0;  // worst edge mismatch of the requested table (explicit only)
  std::string edge;         // curve where that mismatch sits
};

struct BuiltJob {
  IfsSystem system;
  std::vector<BlendVerdict> verdicts;  // cell_offset order
};

/// Resolves the grid and builds every certified component of the IFS.
/// Throws ConfigParseError for grid-dependent config problems and the
/// certification errors of the component builders.
BuiltJob build_job(const JobConfig& config);

enum class Command { validate, build, surface, dimension, report };
std::optional<Command> parse_command(std::string_view name);
const char* to_string(Command command);

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;        // anything unexpected
inline constexpr int kExitConfiguration = 2;  // bad config, grid or resolution
inline constexpr int kExitCertification = 3;  // magnitude, boundary, curve, blend or metric check
inline constexpr int kExitConvergence = 4;    // solver hit max_iter

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;  // written artifacts, in write order
};

/// Runs one command, writing artifacts under `out_dir` and progress plus
/// error messages (with witnesses) to `log`.
RunResult run_pipeline(const JobConfig& config, Command command,
                       const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace fractsurf
