#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "curlforce/cli.hpp"
#include "curlforce/errors.hpp"

namespace curlforce::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "number must be finite");
  return v;
}

std::string string_at(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected an expression string");
  return j.get<std::string>();
}

bool bool_at(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

Eigen::VectorXd point_at(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    fail(where, "expected an array of " + std::to_string(dim) + " numbers");
  }
  Eigen::VectorXd p(dim);
  for (int i = 0; i < dim; ++i) p(i) = number_at(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
  return p;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(where, "unknown field '" + key + "'");
  }
}

Box box_at(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    fail(where, "expected " + std::to_string(dim) + " axis intervals");
  }
  std::vector<Interval> axes;
  for (int i = 0; i < dim; ++i) {
    const json& a = j[static_cast<std::size_t>(i)];
    const std::string at = where + "[" + std::to_string(i) + "]";
    Interval iv;
    if (a.is_array()) {
      if (a.size() != 2) fail(at, "expected [lo, hi]");
      iv.lo = number_at(a[0], at + "[0]");
      iv.hi = number_at(a[1], at + "[1]");
    } else if (a.is_object()) {
      check_keys(a, {"lo", "hi", "lo_open", "hi_open"}, at);
      if (!a.contains("lo") || !a.contains("hi")) fail(at, "needs lo and hi");
      iv.lo = number_at(a["lo"], at + ".lo");
      iv.hi = number_at(a["hi"], at + ".hi");
      if (a.contains("lo_open")) iv.lo_closed = !bool_at(a["lo_open"], at + ".lo_open");
      if (a.contains("hi_open")) iv.hi_closed = !bool_at(a["hi_open"], at + ".hi_open");
    } else {
      fail(at, "expected [lo, hi] or {lo, hi, lo_open, hi_open}");
    }
    if (!(iv.lo < iv.hi)) fail(at, "lo must be smaller than hi");
    axes.push_back(iv);
  }
  return Box(std::move(axes));
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Rethrows expression failures with the JSON location prefixed.
template <typename Fn>
auto with_location(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    fail(where, e.what());
  } catch (const InputError& e) {
    fail(where, e.what());
  }
}

void probe(const ProblemFile& p) {
  const int n = p.dimension;
  std::vector<Eigen::VectorXd> points;
  const Eigen::VectorXd lo = p.domain.lo(), hi = p.domain.hi();
  for (int mask = 0; mask < (1 << n); ++mask) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = (mask >> i) & 1 ? hi(i) : lo(i);
    points.push_back(c);
  }
  points.push_back(0.5 * (lo + hi));
  for (const auto& x : points) {
    std::ostringstream at;
    at.precision(17);
    at << "(";
    for (int i = 0; i < n; ++i) at << (i ? ", " : "") << x(i);
    at << ")";
    try {
      p.field().raw_value(x);
      for (const auto& [name, f] : p.potentials) f.raw_value_and_gradient(x);
    } catch (const Error& e) {
      throw InputError("domain probe failed at " + at.str() + ": " + e.what() +
                       " (shrink the domain to exclude singular points)");
    }
  }
}

}  // namespace

const ScalarField* ProblemFile::potential(const std::string& name) const {
  const auto it = potentials.find(name);
  return it == potentials.end() ? nullptr : &it->second;
}

ProblemFile parse_problem(std::string_view text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw InputError(std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": invalid JSON");
  }
  if (!doc.is_object()) fail(std::string(origin), "top level must be an object");
  check_keys(doc,
             {"dimension", "constants", "force", "potentials", "domain", "mass", "paths", "regions",
              "v_candidates"},
             "problem");

  ProblemFile p;
  p.origin = origin;
  p.canonical_json = doc.dump();

  if (!doc.contains("dimension")) fail("dimension", "missing");
  const double dim = number_at(doc["dimension"], "dimension");
  if (dim != 2.0 && dim != 3.0) fail("dimension", "must be 2 or 3");
  p.dimension = static_cast<int>(dim);

  if (doc.contains("constants")) {
    if (!doc["constants"].is_object()) fail("constants", "expected an object of name: number");
    for (const auto& [name, value] : doc["constants"].items()) {
      p.constants[name] = number_at(value, "constants." + name);
    }
  }

  if (!doc.contains("domain")) fail("domain", "missing");
  p.domain = box_at(doc["domain"], p.dimension, "domain");

  if (doc.contains("mass")) {
    p.mass = number_at(doc["mass"], "mass");
    if (!(p.mass > 0.0)) fail("mass", "must be positive");
  }

  if (!doc.contains("force")) fail("force", "missing");
  const json& force = doc["force"];
  if (!force.is_array()) fail("force", "expected an array of component expressions");
  if (static_cast<int>(force.size()) != p.dimension) {
    fail("force", "needs " + std::to_string(p.dimension) + " components for dimension " +
                      std::to_string(p.dimension) + ", got " + std::to_string(force.size()));
  }
  std::vector<BoundExpression> comps;
  std::set<std::string> names;
  for (const auto& [name, v] : p.constants) names.insert(name);
  for (std::size_t i = 0; i < force.size(); ++i) {
    const std::string where = "force[" + std::to_string(i) + "]";
    p.force_sources.push_back(string_at(force[i], where));
    comps.push_back(with_location(where, [&] {
      return BoundExpression(parse(p.force_sources.back(), p.dimension, names), p.constants);
    }));
  }
  p.force.emplace_back(p.dimension, std::move(comps), p.domain);

  if (doc.contains("potentials")) {
    const json& pots = doc["potentials"];
    if (!pots.is_object()) fail("potentials", "expected an object with U, V, W");
    check_keys(pots, {"U", "V", "W"}, "potentials");
    for (const auto& [name, value] : pots.items()) {
      const std::string where = "potentials." + name;
      const std::string src = string_at(value, where);
      p.potential_sources[name] = src;
      p.potentials.emplace(name, with_location(where, [&] {
                             return ScalarField::parse(src, p.dimension, p.constants, p.domain);
                           }));
    }
  }

  if (doc.contains("v_candidates")) {
    const json& vc = doc["v_candidates"];
    if (!vc.is_array()) fail("v_candidates", "expected an array of expressions");
    for (std::size_t i = 0; i < vc.size(); ++i) {
      const std::string where = "v_candidates[" + std::to_string(i) + "]";
      const std::string src = string_at(vc[i], where);
      with_location(where, [&] { return ScalarField::parse(src, p.dimension, p.constants, p.domain); });
      p.v_candidates.push_back(src);
    }
  }

  if (doc.contains("paths")) {
    if (!doc["paths"].is_object()) fail("paths", "expected an object of named paths");
    for (const auto& [name, decl] : doc["paths"].items()) {
      const std::string where = "paths." + name;
      if (!decl.is_object()) fail(where, "expected an object");
      check_keys(decl, {"polyline", "parametric", "closed"}, where);
      const bool closed = decl.contains("closed") && bool_at(decl["closed"], where + ".closed");
      if (decl.contains("polyline") == decl.contains("parametric")) {
        fail(where, "give exactly one of polyline or parametric");
      }
      if (decl.contains("polyline")) {
        const json& verts = decl["polyline"];
        if (!verts.is_array()) fail(where + ".polyline", "expected an array of points");
        std::vector<Eigen::VectorXd> pts;
        for (std::size_t i = 0; i < verts.size(); ++i) {
          pts.push_back(point_at(verts[i], p.dimension, where + ".polyline[" + std::to_string(i) + "]"));
        }
        p.paths.emplace(name, with_location(where, [&] { return ParamPath::polyline(pts, closed); }));
      } else {
        const json& cs = decl["parametric"];
        if (!cs.is_array() || static_cast<int>(cs.size()) != p.dimension) {
          fail(where + ".parametric", "needs " + std::to_string(p.dimension) + " expressions in s");
        }
        std::vector<std::string> srcs;
        for (std::size_t i = 0; i < cs.size(); ++i) {
          srcs.push_back(string_at(cs[i], where + ".parametric[" + std::to_string(i) + "]"));
        }
        p.paths.emplace(name, with_location(where, [&] {
                          return ParamPath::parametric(srcs, p.constants, closed);
                        }));
      }
    }
  }

  if (doc.contains("regions")) {
    if (!doc["regions"].is_object()) fail("regions", "expected an object of named regions");
    for (const auto& [name, decl] : doc["regions"].items()) {
      const std::string where = "regions." + name;
      if (!decl.is_object()) fail(where, "expected an object");
      check_keys(decl, {"box", "grid", "samples", "seed"}, where);
      if (!decl.contains("box")) fail(where, "needs a box");
      Region region{box_at(decl["box"], p.dimension, where + ".box"), QuasiRandomPlan{200, 1}};
      if (!p.domain.contains(region.box)) fail(where, "box is not inside the domain");
      if (decl.contains("grid")) {
        if (decl.contains("samples") || decl.contains("seed")) {
          fail(where, "grid and samples/seed are exclusive");
        }
        const json& g = decl["grid"];
        if (!g.is_array() || static_cast<int>(g.size()) != p.dimension) {
          fail(where + ".grid", "needs one count per axis");
        }
        GridPlan plan;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double c = number_at(g[i], where + ".grid[" + std::to_string(i) + "]");
          if (c < 1 || c != std::floor(c)) fail(where + ".grid", "counts must be positive integers");
          plan.counts.push_back(static_cast<int>(c));
        }
        region.plan = plan;
      } else {
        QuasiRandomPlan plan{200, 1};
        if (decl.contains("samples")) {
          const double c = number_at(decl["samples"], where + ".samples");
          if (c < 1 || c != std::floor(c)) fail(where + ".samples", "must be a positive integer");
          plan.count = static_cast<int>(c);
        }
        if (decl.contains("seed")) {
          const double s = number_at(decl["seed"], where + ".seed");
          if (s < 0 || s != std::floor(s)) fail(where + ".seed", "must be a non-negative integer");
          plan.seed = static_cast<std::uint64_t>(s);
        }
        region.plan = plan;
      }
      p.regions.emplace(name, std::move(region));
    }
  }

  probe(p);
  return p;
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path.string());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_series(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace curlforce::cli
