#include "fractsurf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fractsurf/expression.hpp"
#include "fractsurf/ifs_core.hpp"

namespace fractsurf {

using json = nlohmann::ordered_json;

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration:";
  for (const ConfigIssue& issue : issues) {
    out += "\n  ";
    out += issue.path.empty() ? "(document)" : issue.path;
    out += ": " + issue.message;
  }
  return out;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string element(const std::string& path, std::size_t k) {
  return path + "[" + std::to_string(k) + "]";
}

const char* form_tag(ScalingForm form) {
  switch (form) {
    case ScalingForm::separable_quartic: return "quartic";
    case ScalingForm::polynomial_product: return "product";
    case ScalingForm::expression: return "expression";
  }
  return "?";
}

// Walks a JSON document, recording every problem it meets.
class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void issue(const std::string& path, const std::string& message) {
    issues.push_back({path, message});
  }

  bool object(const json& v, const std::string& path) {
    if (v.is_object()) return true;
    issue(path, "expected an object");
    return false;
  }

  void allowed_keys(const json& v, const std::string& path, std::set<std::string> keys) {
    for (const auto& item : v.items()) {
      if (!keys.contains(item.key())) issue(child(path, item.key()), "unknown key");
    }
  }

  std::optional<double> number(const json& v, const std::string& path) {
    if (!v.is_number()) {
      issue(path, "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      issue(path, "expected a finite number");
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
      issue(path, "expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::uint64_t> unsigned_integer(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) {
      issue(path, "expected a non-negative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<std::string> string(const json& v, const std::string& path) {
    if (!v.is_string()) {
      issue(path, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& path) {
    std::vector<double> out;
    if (!v.is_array()) {
      issue(path, "expected an array of numbers");
      return out;
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (auto d = number(v[k], element(path, k))) out.push_back(*d);
    }
    return out;
  }

  // Parses an expression and checks which variables it may use.
  void expression(const std::string& text, const std::string& path, bool allow_xy, bool allow_t) {
    try {
      const Expr e = parse_expression(text);
      if (!allow_xy && (e.depends_on(Var::x) || e.depends_on(Var::y))) {
        issue(path, "must not depend on x or y");
      }
      if (!allow_t && e.depends_on(Var::t)) issue(path, "must not depend on t");
    } catch (const ParseError& err) {
      issue(path, err.what());
    }
  }

  std::optional<CellIndex> cell(const std::string& key, const std::string& path) {
    const auto comma = key.find(',');
    CellIndex c{0, 0};
    if (comma != std::string::npos) {
      const auto* begin = key.data();
      const auto* end = key.data() + key.size();
      const auto r1 = std::from_chars(begin, begin + comma, c.i);
      const auto r2 = std::from_chars(begin + comma + 1, end, c.j);
      if (r1.ec == std::errc{} && r1.ptr == begin + comma && r2.ec == std::errc{} && r2.ptr == end &&
          c.i >= 1 && c.j >= 1) {
        return c;
      }
    }
    issue(path, "cell keys look like \"i,j\" with 1-based i and j");
    return std::nullopt;
  }

  void increasing(const std::vector<double>& knots, const std::string& path) {
    if (knots.size() < 2) issue(path, "need at least two knots");
    for (std::size_t k = 1; k < knots.size(); ++k) {
      if (!(knots[k] > knots[k - 1])) issue(element(path, k), "knots must be strictly increasing");
    }
  }

  GridSpec grid(const json& v, const std::string& path) {
    GridSpec g;
    if (!object(v, path)) return g;
    if (v.contains("file")) {
      allowed_keys(v, path, {"file"});
      g.source = GridSpec::Source::file;
      g.path = string(v["file"], child(path, "file")).value_or("");
      return g;
    }
    if (v.contains("fixture")) {
      allowed_keys(v, path, {"fixture"});
      g.source = GridSpec::Source::fixture;
      g.fixture = string(v["fixture"], child(path, "fixture")).value_or("");
      return g;
    }
    allowed_keys(v, path, {"x", "y", "z"});
    for (const char* key : {"x", "y", "z"}) {
      if (!v.contains(key)) issue(child(path, key), "required key missing");
    }
    if (v.contains("x")) g.x = numbers(v["x"], child(path, "x"));
    if (v.contains("y")) g.y = numbers(v["y"], child(path, "y"));
    increasing(g.x, child(path, "x"));
    increasing(g.y, child(path, "y"));
    if (v.contains("z")) {
      const json& z = v["z"];
      const std::string zp = child(path, "z");
      if (!z.is_array()) {
        issue(zp, "expected one array of heights per y knot");
      } else {
        if (z.size() != g.y.size()) {
          issue(zp, "expected " + std::to_string(g.y.size()) + " rows (one per y knot), got " +
                        std::to_string(z.size()));
        }
        for (std::size_t j = 0; j < z.size(); ++j) {
          g.rows.push_back(numbers(z[j], element(zp, j)));
          if (g.rows.back().size() != g.x.size()) {
            issue(element(zp, j), "expected " + std::to_string(g.x.size()) +
                                      " heights (one per x knot), got " +
                                      std::to_string(g.rows.back().size()));
          }
        }
      }
    }
    return g;
  }

  std::optional<ScalingSpec> scaling_spec(const json& v, const std::string& path) {
    if (!object(v, path)) return std::nullopt;
    if (!v.contains("form")) {
      issue(child(path, "form"), "required key missing");
      return std::nullopt;
    }
    const auto tag = string(v["form"], child(path, "form"));
    if (!tag) return std::nullopt;
    ScalingSpec s;
    if (*tag == "quartic") {
      s.form = ScalingForm::separable_quartic;
      allowed_keys(v, path, {"form", "c"});
      if (!v.contains("c")) {
        issue(child(path, "c"), "required key missing");
      } else if (auto c = number(v["c"], child(path, "c"))) {
        s.coefficient = *c;
      }
    } else if (*tag == "product") {
      s.form = ScalingForm::polynomial_product;
      allowed_keys(v, path, {"form", "psi", "exponents", "outer"});
      if (v.contains("psi")) s.psi = string(v["psi"], child(path, "psi")).value_or(s.psi);
      if (v.contains("outer")) s.outer = string(v["outer"], child(path, "outer")).value_or(s.outer);
      expression(s.psi, child(path, "psi"), true, false);
      expression(s.outer, child(path, "outer"), false, true);
      if (v.contains("exponents")) {
        const std::string ep = child(path, "exponents");
        const auto e = numbers(v["exponents"], ep);
        if (e.size() != 4) {
          issue(ep, "expected [x_upper, x_lower, y_upper, y_lower]");
        } else {
          s.exponents = {e[0], e[1], e[2], e[3]};
          for (std::size_t k = 0; k < 4; ++k) {
            if (e[k] < 1.0) issue(element(ep, k), "exponents below 1 are not Lipschitz at the edge");
          }
        }
      }
    } else if (*tag == "expression") {
      s.form = ScalingForm::expression;
      allowed_keys(v, path, {"form", "s"});
      if (!v.contains("s")) {
        issue(child(path, "s"), "required key missing");
      } else {
        s.expression = string(v["s"], child(path, "s")).value_or("");
        expression(s.expression, child(path, "s"), true, false);
      }
    } else {
      issue(child(path, "form"), "unknown form \"" + *tag + "\" (quartic, product, expression)");
      return std::nullopt;
    }
    return s;
  }

  Polynomial polynomial(const json& v, const std::string& path) {
    Polynomial p;
    p.coefficients = numbers(v, path);
    if (v.is_array() && p.coefficients.empty()) issue(path, "empty coefficient list");
    return p;
  }

  std::vector<std::vector<Polynomial>> curve_table(const json& v, const std::string& path) {
    std::vector<std::vector<Polynomial>> out;
    if (!v.is_array()) {
      issue(path, "expected one array of pieces per curve");
      return out;
    }
    for (std::size_t a = 0; a < v.size(); ++a) {
      std::vector<Polynomial> pieces;
      const std::string cp = element(path, a);
      if (!v[a].is_array()) {
        issue(cp, "expected an array of coefficient lists");
      } else {
        for (std::size_t k = 0; k < v[a].size(); ++k) {
          pieces.push_back(polynomial(v[a][k], element(cp, k)));
        }
      }
      out.push_back(std::move(pieces));
    }
    return out;
  }

  std::vector<MonomialTerm> blend_table(const json& v, const std::string& path) {
    std::vector<MonomialTerm> out;
    if (!v.is_array()) {
      issue(path, "expected an array of [coefficient, x_power, y_power]");
      return out;
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string tp = element(path, k);
      const json& t = v[k];
      if (!t.is_array() || t.size() != 3) {
        issue(tp, "expected [coefficient, x_power, y_power]");
        continue;
      }
      const auto c = number(t[0], element(tp, 0));
      const auto px = integer(t[1], element(tp, 1));
      const auto py = integer(t[2], element(tp, 2));
      if (!c || !px || !py) continue;
      if (*px < 0 || *py < 0 || *px > 64 || *py > 64) {
        issue(tp, "powers must lie in 0..64");
        continue;
      }
      out.push_back({*c, static_cast<int>(*px), static_cast<int>(*py)});
    }
    return out;
  }

  template <class T, class F>
  std::map<CellIndex, T> cell_map(const json& v, const std::string& path, F&& read) {
    std::map<CellIndex, T> out;
    if (!object(v, path)) return out;
    for (const auto& item : v.items()) {
      const std::string ip = child(path, item.key());
      const auto c = cell(item.key(), ip);
      if (!c) continue;
      if (auto value = read(item.value(), ip)) out.emplace(*c, std::move(*value));
    }
    return out;
  }
};

json polynomial_json(const Polynomial& p) { return json(p.coefficients); }

json scaling_json(const ScalingSpec& s) {
  json out = json::object();
  out["form"] = form_tag(s.form);
  switch (s.form) {
    case ScalingForm::separable_quartic:
      out["c"] = s.coefficient;
      break;
    case ScalingForm::polynomial_product:
      out["psi"] = s.psi;
      out["exponents"] = {s.exponents.x_upper, s.exponents.x_lower, s.exponents.y_upper,
                          s.exponents.y_lower};
      out["outer"] = s.outer;
      break;
    case ScalingForm::expression:
      out["s"] = s.expression;
      break;
  }
  return out;
}

std::optional<CurveMethod> curve_method(const std::string& tag) {
  if (tag == "linear") return CurveMethod::linear;
  if (tag == "quadratic") return CurveMethod::quadratic;
  if (tag == "pieces") return CurveMethod::pieces;
  return std::nullopt;
}

void read_document(Reader& rd, const json& doc, JobConfig& cfg, bool from_fixture) {
  const std::set<std::string> sections = {"name",  "fixture", "grid",  "orientations", "scaling",
                                          "boundary", "blend", "g",     "solver",       "dimension",
                                          "chaos", "output"};
  rd.allowed_keys(doc, "", sections);
  if (!from_fixture) {
    for (const char* key : {"grid", "scaling", "boundary", "blend"}) {
      if (!doc.contains(key)) rd.issue(key, "required key missing");
    }
  }

  if (doc.contains("name")) cfg.name = rd.string(doc["name"], "name").value_or("");
  if (doc.contains("grid")) cfg.grid = rd.grid(doc["grid"], "grid");

  if (doc.contains("orientations")) {
    cfg.orientations = rd.cell_map<Orientation>(
        doc["orientations"], "orientations",
        [&](const json& v, const std::string& path) -> std::optional<Orientation> {
          const auto o = rd.numbers(v, path);
          if (o.size() != 2 || (o[0] != 1 && o[0] != -1) || (o[1] != 1 && o[1] != -1)) {
            rd.issue(path, "expected [x, y] with entries +1 or -1");
            return std::nullopt;
          }
          return Orientation{static_cast<int>(o[0]), static_cast<int>(o[1])};
        });
  }

  if (doc.contains("scaling")) {
    const json& s = doc["scaling"];
    cfg.scaling_default.reset();
    cfg.scaling.clear();
    if (rd.object(s, "scaling")) {
      rd.allowed_keys(s, "scaling", {"default", "cells"});
      if (!s.contains("default") && !s.contains("cells")) {
        rd.issue("scaling", "needs \"default\", \"cells\" or both");
      }
      if (s.contains("default")) cfg.scaling_default = rd.scaling_spec(s["default"], "scaling.default");
      if (s.contains("cells")) {
        cfg.scaling = rd.cell_map<ScalingSpec>(
            s["cells"], "scaling.cells",
            [&](const json& v, const std::string& path) { return rd.scaling_spec(v, path); });
      }
    }
  }

  if (doc.contains("boundary")) {
    const json& b = doc["boundary"];
    cfg.pieces = {};
    if (rd.object(b, "boundary")) {
      rd.allowed_keys(b, "boundary", {"method", "q", "r"});
      if (!b.contains("method")) {
        rd.issue("boundary.method", "required key missing");
      } else if (auto tag = rd.string(b["method"], "boundary.method")) {
        if (auto m = curve_method(*tag)) {
          cfg.curve_method = *m;
        } else {
          rd.issue("boundary.method", "unknown method \"" + *tag + "\" (linear, quadratic, pieces)");
        }
      }
      if (b.contains("q")) cfg.pieces.q = rd.curve_table(b["q"], "boundary.q");
      if (b.contains("r")) cfg.pieces.r = rd.curve_table(b["r"], "boundary.r");
      if (cfg.curve_method != CurveMethod::linear) {
        for (const char* key : {"q", "r"}) {
          if (!b.contains(key)) rd.issue(std::string("boundary.") + key, "required for this method");
        }
      }
    }
  }

  if (doc.contains("blend")) {
    const json& b = doc["blend"];
    cfg.blend = {};
    if (rd.object(b, "blend")) {
      rd.allowed_keys(b, "blend", {"mode", "on_invalid", "cells"});
      if (!b.contains("mode")) {
        rd.issue("blend.mode", "required key missing");
      } else if (auto tag = rd.string(b["mode"], "blend.mode")) {
        if (*tag == "coons") {
          cfg.blend.mode = BlendForm::coons;
        } else if (*tag == "explicit") {
          cfg.blend.mode = BlendForm::explicit_polynomial;
        } else {
          rd.issue("blend.mode", "unknown mode \"" + *tag + "\" (coons, explicit)");
        }
      }
      if (b.contains("on_invalid")) {
        if (auto tag = rd.string(b["on_invalid"], "blend.on_invalid")) {
          if (*tag == "coons") {
            cfg.blend.fallback_to_coons = true;
          } else if (*tag != "error") {
            rd.issue("blend.on_invalid", "expected \"error\" or \"coons\"");
          }
        }
      }
      if (b.contains("cells")) {
        cfg.blend.tables = rd.cell_map<std::vector<MonomialTerm>>(
            b["cells"], "blend.cells",
            [&](const json& v, const std::string& path) {
              return std::optional<std::vector<MonomialTerm>>(rd.blend_table(v, path));
            });
      }
      if (cfg.blend.mode == BlendForm::explicit_polynomial && !b.contains("cells")) {
        rd.issue("blend.cells", "required for explicit blends");
      }
      if (cfg.blend.mode == BlendForm::coons && b.contains("cells")) {
        rd.issue("blend.cells", "tables are only read in explicit mode");
      }
    }
  }

  if (doc.contains("g")) {
    const json& g = doc["g"];
    cfg.g = {};
    if (g.is_string()) {
      cfg.g.expression = g.get<std::string>();
    } else if (rd.object(g, "g")) {
      rd.allowed_keys(g, "g", {"expr", "cells", "lipschitz"});
      if (g.contains("expr")) cfg.g.expression = rd.string(g["expr"], "g.expr").value_or("0");
      if (g.contains("cells")) {
        cfg.g.cells = rd.cell_map<std::string>(
            g["cells"], "g.cells",
            [&](const json& v, const std::string& path) { return rd.string(v, path); });
      }
      if (g.contains("lipschitz")) {
        if (auto l = rd.number(g["lipschitz"], "g.lipschitz")) {
          if (*l < 0) rd.issue("g.lipschitz", "must be >= 0");
          cfg.g.lipschitz = *l;
        }
      }
    }
    rd.expression(cfg.g.expression, g.is_string() ? "g" : "g.expr", true, false);
    for (const auto& [c, text] : cfg.g.cells) rd.expression(text, "g.cells." + cell_key(c), true, false);
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    cfg.solver = {};
    if (rd.object(s, "solver")) {
      rd.allowed_keys(s, "solver", {"resolution", "tol", "max_iter"});
      if (s.contains("resolution")) {
        if (auto r = rd.integer(s["resolution"], "solver.resolution")) {
          if (*r < 2 || *r > 16385) rd.issue("solver.resolution", "must lie in 2..16385");
          else cfg.solver.resolution = static_cast<int>(*r);
        }
      }
      if (s.contains("tol")) {
        if (auto t = rd.number(s["tol"], "solver.tol")) {
          if (*t <= 0) rd.issue("solver.tol", "must be > 0");
          else cfg.solver.tolerance = *t;
        }
      }
      if (s.contains("max_iter")) {
        if (auto k = rd.integer(s["max_iter"], "solver.max_iter")) {
          if (*k < 1 || *k > 100000000) rd.issue("solver.max_iter", "must lie in 1..1e8");
          else cfg.solver.max_iterations = static_cast<int>(*k);
        }
      }
    }
  }

  if (doc.contains("dimension")) {
    const json& d = doc["dimension"];
    cfg.dimension = {};
    if (rd.object(d, "dimension")) {
      rd.allowed_keys(d, "dimension", {"levels", "epsilon_fraction", "cross_check_points"});
      if (d.contains("levels")) {
        if (auto k = rd.integer(d["levels"], "dimension.levels")) {
          if (*k < 0 || *k > 30 || (*k > 0 && *k < 3)) rd.issue("dimension.levels", "must be 0 (automatic) or lie in 3..30");
          else cfg.dimension.levels = static_cast<int>(*k);
        }
      }
      if (d.contains("epsilon_fraction")) {
        if (auto f = rd.number(d["epsilon_fraction"], "dimension.epsilon_fraction")) {
          if (!(*f > 0 && *f < 0.5)) rd.issue("dimension.epsilon_fraction", "must lie in (0, 0.5)");
          else cfg.dimension.epsilon_fraction = *f;
        }
      }
      if (d.contains("cross_check_points")) {
        cfg.dimension.cross_check_points =
            rd.unsigned_integer(d["cross_check_points"], "dimension.cross_check_points").value_or(0);
      }
    }
  }

  if (doc.contains("chaos")) {
    const json& c = doc["chaos"];
    cfg.chaos = {};
    if (rd.object(c, "chaos")) {
      rd.allowed_keys(c, "chaos", {"points", "seed"});
      if (c.contains("points")) {
        if (auto p = rd.unsigned_integer(c["points"], "chaos.points")) {
          if (*p < 1) rd.issue("chaos.points", "must be >= 1");
          else cfg.chaos.points = *p;
        }
      }
      if (c.contains("seed")) cfg.chaos.seed = rd.unsigned_integer(c["seed"], "chaos.seed").value_or(1);
    }
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    cfg.output_dir = "out";
    if (rd.object(o, "output")) {
      rd.allowed_keys(o, "output", {"dir"});
      if (o.contains("dir")) cfg.output_dir = rd.string(o["dir"], "output.dir").value_or("out");
    }
  }
}

}  // namespace

ConfigParseError::ConfigParseError(std::vector<ConfigIssue> issues)
    : ConfigurationError(join_issues(issues)), issues_(std::move(issues)) {}

std::string cell_key(CellIndex c) { return std::to_string(c.i) + "," + std::to_string(c.j); }

const ScalingSpec* JobConfig::scaling_for(CellIndex c) const {
  const auto it = scaling.find(c);
  if (it != scaling.end()) return &it->second;
  return scaling_default ? &*scaling_default : nullptr;
}

JobConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigParseError(std::vector<ConfigIssue>{{"", std::string("malformed JSON: ") + err.what()}});
  }
  Reader rd;
  JobConfig cfg;
  if (!doc.is_object()) throw ConfigParseError(std::vector<ConfigIssue>{{"", "the document must be a JSON object"}});

  bool from_fixture = false;
  if (doc.contains("fixture")) {
    if (auto name = rd.string(doc["fixture"], "fixture")) {
      try {
        cfg = load_fixture(*name);
        from_fixture = true;
      } catch (const ConfigurationError& err) {
        rd.issue("fixture", err.what());
      }
    }
  }
  read_document(rd, doc, cfg, from_fixture);

  // Cross-checks that need the grid, when it is available without I/O.
  if (rd.issues.empty() && cfg.grid.source != GridSpec::Source::file) {
    try {
      const DataGrid grid = resolve_grid(cfg.grid);
      for (ConfigIssue& issue : check_against_grid(cfg, grid)) rd.issues.push_back(std::move(issue));
    } catch (const Error& err) {
      rd.issue("grid", err.what());
    }
  }
  if (!rd.issues.empty()) throw ConfigParseError(std::move(rd.issues));
  return cfg;
}

std::vector<ConfigIssue> check_against_grid(const JobConfig& cfg, const DataGrid& grid) {
  std::vector<ConfigIssue> issues;
  const int n = grid.n();
  const int m = grid.m();
  auto inside = [&](CellIndex c) { return c.i >= 1 && c.i <= n && c.j >= 1 && c.j <= m; };
  auto stray = [&](const auto& table, const std::string& path) {
    for (const auto& entry : table) {
      if (!inside(entry.first)) {
        issues.push_back({path + "." + cell_key(entry.first),
                          "no such cell in a " + std::to_string(n) + " x " + std::to_string(m) + " grid"});
      }
    }
  };
  stray(cfg.orientations, "orientations");
  stray(cfg.scaling, "scaling.cells");
  stray(cfg.blend.tables, "blend.cells");
  stray(cfg.g.cells, "g.cells");

  for (const CellIndex c : grid.cells()) {
    if (!cfg.scaling_for(c)) issues.push_back({"scaling.cells", "missing cell " + cell_key(c)});
    if (cfg.blend.mode == BlendForm::explicit_polynomial && !cfg.blend.tables.contains(c)) {
      issues.push_back({"blend.cells", "missing cell " + cell_key(c)});
    }
  }

  if (cfg.curve_method != CurveMethod::linear) {
    auto check = [&](const std::vector<std::vector<Polynomial>>& table, const std::string& path,
                     int curves, int pieces) {
      if (static_cast<int>(table.size()) != curves) {
        issues.push_back({path, "expected " + std::to_string(curves) + " curves, got " +
                                    std::to_string(table.size())});
      }
      for (std::size_t a = 0; a < table.size(); ++a) {
        if (static_cast<int>(table[a].size()) != pieces) {
          issues.push_back({path + "[" + std::to_string(a) + "]",
                            "expected " + std::to_string(pieces) + " pieces, got " +
                                std::to_string(table[a].size())});
        }
        if (cfg.curve_method != CurveMethod::quadratic) continue;
        for (std::size_t k = 0; k < table[a].size(); ++k) {
          if (table[a][k].degree() > 2) {
            issues.push_back({path + "[" + std::to_string(a) + "][" + std::to_string(k) + "]",
                              "quadratic method allows at most 3 coefficients"});
          }
        }
      }
    };
    check(cfg.pieces.q, "boundary.q", n + 1, m);
    check(cfg.pieces.r, "boundary.r", m + 1, n);
  } else if (!cfg.pieces.q.empty() || !cfg.pieces.r.empty()) {
    issues.push_back({"boundary", "linear method takes no q/r pieces"});
  }

  try {
    check_resolution(grid, cfg.solver.resolution);
  } catch (const ConfigurationError& err) {
    issues.push_back({"solver.resolution", err.what()});
  }
  return issues;
}

std::string serialize_config(const JobConfig& cfg) {
  json doc = json::object();
  if (!cfg.name.empty()) doc["name"] = cfg.name;

  json grid = json::object();
  switch (cfg.grid.source) {
    case GridSpec::Source::inline_rows:
      grid["x"] = cfg.grid.x;
      grid["y"] = cfg.grid.y;
      grid["z"] = cfg.grid.rows;
      break;
    case GridSpec::Source::file: grid["file"] = cfg.grid.path; break;
    case GridSpec::Source::fixture: grid["fixture"] = cfg.grid.fixture; break;
  }
  doc["grid"] = grid;

  if (!cfg.orientations.empty()) {
    json o = json::object();
    for (const auto& [c, v] : cfg.orientations) o[cell_key(c)] = {v.x, v.y};
    doc["orientations"] = o;
  }

  json scaling = json::object();
  if (cfg.scaling_default) scaling["default"] = scaling_json(*cfg.scaling_default);
  if (!cfg.scaling.empty()) {
    json cells = json::object();
    for (const auto& [c, s] : cfg.scaling) cells[cell_key(c)] = scaling_json(s);
    scaling["cells"] = cells;
  }
  doc["scaling"] = scaling;

  json boundary = json::object();
  boundary["method"] = to_string(cfg.curve_method);
  if (cfg.curve_method != CurveMethod::linear) {
    for (const auto& [key, table] : {std::pair{"q", &cfg.pieces.q}, std::pair{"r", &cfg.pieces.r}}) {
      json curves = json::array();
      for (const auto& pieces : *table) {
        json row = json::array();
        for (const Polynomial& p : pieces) row.push_back(polynomial_json(p));
        curves.push_back(row);
      }
      boundary[key] = curves;
    }
  }
  doc["boundary"] = boundary;

  json blend = json::object();
  blend["mode"] = cfg.blend.mode == BlendForm::coons ? "coons" : "explicit";
  blend["on_invalid"] = cfg.blend.fallback_to_coons ? "coons" : "error";
  if (cfg.blend.mode == BlendForm::explicit_polynomial) {
    json cells = json::object();
    for (const auto& [c, terms] : cfg.blend.tables) {
      json t = json::array();
      for (const MonomialTerm& term : terms) t.push_back({term.coefficient, term.x_power, term.y_power});
      cells[cell_key(c)] = t;
    }
    blend["cells"] = cells;
  }
  doc["blend"] = blend;

  if (cfg.g.cells.empty() && !cfg.g.lipschitz) {
    doc["g"] = cfg.g.expression;
  } else {
    json g = json::object();
    g["expr"] = cfg.g.expression;
    if (!cfg.g.cells.empty()) {
      json cells = json::object();
      for (const auto& [c, text] : cfg.g.cells) cells[cell_key(c)] = text;
      g["cells"] = cells;
    }
    if (cfg.g.lipschitz) g["lipschitz"] = *cfg.g.lipschitz;
    doc["g"] = g;
  }

  doc["solver"] = {{"resolution", cfg.solver.resolution},
                   {"tol", cfg.solver.tolerance},
                   {"max_iter", cfg.solver.max_iterations}};
  doc["dimension"] = {{"levels", cfg.dimension.levels},
                      {"epsilon_fraction", cfg.dimension.epsilon_fraction},
                      {"cross_check_points", cfg.dimension.cross_check_points}};
  doc["chaos"] = {{"points", cfg.chaos.points}, {"seed", cfg.chaos.seed}};
  doc["output"] = {{"dir", cfg.output_dir}};
  return doc.dump(2) + "\n";
}

DataGrid parse_grid_text(const std::string& text) {
  std::vector<std::vector<double>> lines;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line) {
      if (ch == ',' || ch == '\t' || ch == ';' || ch == '\r') ch = ' ';
    }
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), v);
      if (ec != std::errc{} || (ptr != line.data() + line.size() && *ptr != ' ')) {
        throw InvalidGrid("grid text line " + std::to_string(line_no) + ": cannot read a number at column " +
                          std::to_string(pos + 1));
      }
      values.push_back(v);
      pos = static_cast<std::size_t>(ptr - line.data());
    }
    if (!values.empty()) lines.push_back(std::move(values));
  }
  if (lines.size() < 3) {
    throw InvalidGrid("grid text needs an x line, a y line and one height line per y knot");
  }
  std::vector<double> x = lines[0];
  std::vector<double> y = lines[1];
  std::vector<std::vector<double>> rows(lines.begin() + 2, lines.end());
  return DataGrid::from_rows(std::move(x), std::move(y), rows);
}

std::string format_grid_text(const DataGrid& grid) {
  auto put = [](std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
  };
  std::string out;
  for (int i = 0; i <= grid.n(); ++i) {
    if (i) out += ' ';
    put(out, grid.x(i));
  }
  out += '\n';
  for (int j = 0; j <= grid.m(); ++j) {
    if (j) out += ' ';
    put(out, grid.y(j));
  }
  out += '\n';
  for (int j = 0; j <= grid.m(); ++j) {
    for (int i = 0; i <= grid.n(); ++i) {
      if (i) out += ' ';
      put(out, grid.z(i, j));
    }
    out += '\n';
  }
  return out;
}

DataGrid resolve_grid(const GridSpec& spec) {
  switch (spec.source) {
    case GridSpec::Source::inline_rows:
      return DataGrid::from_rows(spec.x, spec.y, spec.rows);
    case GridSpec::Source::file: {
      std::ifstream in(spec.path);
      if (!in) throw ConfigurationError("cannot open grid file '" + spec.path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      return parse_grid_text(text.str());
    }
    case GridSpec::Source::fixture: {
      const JobConfig fixture = load_fixture(spec.fixture);
      return resolve_grid(fixture.grid);
    }
  }
  throw ConfigurationError("unknown grid source");
}

}  // namespace fractsurf
