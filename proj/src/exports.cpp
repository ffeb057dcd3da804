#include "fractsurf/exports.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "fractsurf/errors.hpp"

namespace fractsurf {

std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

void write_heightmap_csv(std::ostream& out, const HeightField& field) {
  const Rect& d = field.domain();
  const int r = field.resolution();
  out << "resolution=" << r << ",x0=" << format_number(d.x0) << ",x1=" << format_number(d.x1)
      << ",y0=" << format_number(d.y0) << ",y1=" << format_number(d.y1) << '\n';
  std::string line;
  for (int b = r - 1; b >= 0; --b) {
    line.clear();
    for (int a = 0; a < r; ++a) {
      if (a) line += ',';
      line += format_number(field.at(a, b));
    }
    line += '\n';
    out << line;
  }
}

namespace {

double read_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigurationError("heightmap csv: bad number '" + std::string(text) + "' in " + where);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

HeightField read_heightmap_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigurationError("heightmap csv: empty input");
  const auto fields = split(line, ',');
  const char* names[] = {"resolution", "x0", "x1", "y0", "y1"};
  if (fields.size() != 5) throw ConfigurationError("heightmap csv: malformed header");
  double values[5];
  for (int k = 0; k < 5; ++k) {
    const std::string prefix = std::string(names[k]) + "=";
    if (fields[k].substr(0, prefix.size()) != prefix) {
      throw ConfigurationError("heightmap csv: header field " + std::to_string(k + 1) +
                               " should start with '" + prefix + "'");
    }
    values[k] = read_double(fields[k].substr(prefix.size()), "header");
  }
  const int r = static_cast<int>(values[0]);
  if (r < 2 || values[0] != r) throw ConfigurationError("heightmap csv: bad resolution");
  HeightField field(r, {values[1], values[2], values[3], values[4]});
  for (int b = r - 1; b >= 0; --b) {
    if (!std::getline(in, line)) throw ConfigurationError("heightmap csv: missing rows");
    const auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != r) {
      throw ConfigurationError("heightmap csv: row for node line " + std::to_string(b) +
                               " has " + std::to_string(cells.size()) + " values");
    }
    for (int a = 0; a < r; ++a) field.at(a, b) = read_double(cells[static_cast<std::size_t>(a)], "row");
  }
  return field;
}

void write_pgm(std::ostream& out, const HeightField& field) {
  const int r = field.resolution();
  const double lo = field.min();
  const double hi = field.max();
  out << "P5\n# fractsurf heightmap: pixel = round((z - zmin) / (zmax - zmin) * 65535), "
      << "0 when zmax == zmin; top row is y = " << format_number(field.domain().y1) << "\n"
      << "# zmin=" << format_number(lo) << " zmax=" << format_number(hi) << "\n"
      << r << ' ' << r << "\n65535\n";
  std::string row(static_cast<std::size_t>(2 * r), '\0');
  for (int b = r - 1; b >= 0; --b) {
    for (int a = 0; a < r; ++a) {
      const double t = hi > lo ? (field.at(a, b) - lo) / (hi - lo) : 0.0;
      const auto v = static_cast<unsigned>(std::lround(t * 65535.0));
      row[static_cast<std::size_t>(2 * a)] = static_cast<char>(v >> 8);
      row[static_cast<std::size_t>(2 * a + 1)] = static_cast<char>(v & 0xff);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_xyz(std::ostream& out, std::span<const Point3> points) {
  for (const Point3& p : points) {
    out << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z) << '\n';
  }
}

void write_counts_csv(std::ostream& out, const CountsTable& counts) {
  out << "delta,count\n";
  for (const CountRow& row : counts) out << format_number(row.delta) << ',' << format_number(row.count) << '\n';
}

void write_key_values(std::ostream& out, const KeyValues& values) {
  for (const auto& [key, value] : values) out << key << '=' << value << '\n';
}

KeyValues dimension_values(const DimensionReport& report) {
  KeyValues kv;
  auto add = [&](std::string key, std::string value) { kv.emplace_back(std::move(key), std::move(value)); };
  add("applicable", report.applicability.applicable() ? "true" : "false");
  add("applicability_reason", report.applicability.reason());
  add("case", report.applicability.applicable() ? to_string(report.bounds.kind) : "inapplicable");
  add("lower_bound", format_number(report.bounds.lower));
  add("upper_bound", format_number(report.bounds.upper));
  add("sum_s_bar", format_number(report.bounds.sum_bar));
  add("sum_s_underbar", format_number(report.bounds.sum_underbar));
  add("gap_case", report.bounds.gap_case ? "true" : "false");
  add("epsilon_fraction", format_number(report.epsilon_fraction));
  add("s_underbar_open_interior", "0");
  add("empirical_estimate", format_number(report.estimate()));
  add("r_squared", format_number(report.fit.r_squared));
  add("scales_used", std::to_string(report.fit.scales_used));
  add("coarsest_excluded", report.fit.coarsest_excluded ? "true" : "false");
  if (!report.fit.warning.empty()) add("warning", report.fit.warning);
  if (!report.annotation.empty()) add("annotation", report.annotation);
  for (std::size_t k = 0; k < report.counts.size(); ++k) {
    const std::string prefix = "scale" + std::to_string(k + 1) + ".";
    add(prefix + "delta", format_number(report.counts[k].delta));
    add(prefix + "count", format_number(report.counts[k].count));
    add(prefix + "residual", format_number(report.fit.residuals[k]));
  }
  if (report.point_fit) add("point_cloud_estimate", format_number(report.point_fit->slope));
  return kv;
}

std::string dimension_text(const DimensionReport& report) {
  std::ostringstream out;
  out << "Box-counting dimension\n\n";
  out << "hypotheses: " << report.applicability.reason() << "\n";
  if (report.applicability.applicable()) {
    out << "case: " << to_string(report.bounds.kind) << "\n";
    out << "bounds: " << format_number(report.bounds.lower) << " <= dim <= "
        << format_number(report.bounds.upper) << "\n";
    out << "  sum s_bar = " << format_number(report.bounds.sum_bar)
        << ", sum s_underbar = " << format_number(report.bounds.sum_underbar) << "\n";
    if (!report.bounds.note.empty()) out << "  " << report.bounds.note << "\n";
  } else {
    out << "no theoretical band\n";
  }
  out << "interior extrema on cells shrunk by epsilon = " << format_number(report.epsilon_fraction)
      << " x short side";
  if (!report.epsilon.empty()) out << " (" << format_number(report.epsilon.front()) << " on the first cell)";
  out << "\n  (the infimum over the open cell is 0 for boundary-vanishing fields)\n\n";
  out << "  delta            N(delta)      residual\n";
  for (std::size_t k = 0; k < report.counts.size(); ++k) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-16.10g %-13.0f %+.3e\n", report.counts[k].delta,
                  report.counts[k].count, report.fit.residuals[k]);
    out << line;
  }
  out << "\nempirical estimate: " << format_number(report.estimate())
      << " (R^2 = " << format_number(report.fit.r_squared) << ", " << report.fit.scales_used
      << " scales" << (report.fit.coarsest_excluded ? ", coarsest excluded" : "") << ")\n";
  if (!report.fit.warning.empty()) out << "warning: " << report.fit.warning << "\n";
  if (report.point_fit) {
    out << "point-cloud cross-check: " << format_number(report.point_fit->slope) << "\n";
  }
  return out.str();
}

}  // namespace fractsurf
