#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fractsurf/dimension.hpp"
#include "fractsurf/ifs_core.hpp"

namespace fractsurf {

/// Shortest decimal that reads back to the same double ("0.1", "1e-06", "3").
std::string format_number(double value);

/// First line "resolution=R,x0=..,x1=..,y0=..,y1=.."; then R lines of R
/// comma-separated heights, the first line holding y = y1 (top row first).
void write_heightmap_csv(std::ostream& out, const HeightField& field);
/// Inverse of write_heightmap_csv. Throws ConfigurationError on malformed input.
HeightField read_heightmap_csv(std::istream& in);

/// Binary 16-bit PGM (P5, maxval 65535, big-endian), top row = y1.
/// Pixel = round((z - zmin) / (zmax - zmin) * 65535), 0 when zmax == zmin;
/// zmin and zmax are written in a header comment.
void write_pgm(std::ostream& out, const HeightField& field);

/// "x y z" per line.
void write_xyz(std::ostream& out, std::span<const Point3> points);

/// "delta,count" header and one line per scale.
void write_counts_csv(std::ostream& out, const CountsTable& counts);

using KeyValues = std::vector<std::pair<std::string, std::string>>;
/// "key=value" per line.
void write_key_values(std::ostream& out, const KeyValues& values);

KeyValues dimension_values(const DimensionReport& report);
std::string dimension_text(const DimensionReport& report);

}  // namespace fractsurf
