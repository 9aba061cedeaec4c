#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "curlforce/accessibility.hpp"
#include "curlforce/auxiliary.hpp"
#include "curlforce/cli.hpp"
#include "curlforce/darboux.hpp"
#include "curlforce/dynamics.hpp"
#include "curlforce/errors.hpp"
#include "curlforce/pathwork.hpp"

namespace curlforce::cli {

namespace {

using json = nlohmann::ordered_json;

struct Series {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string command;
  json results = json::object();
  json assertions = json::array();
  std::vector<Series> series;
  bool passed = true;

  void check(const std::string& name, double value, double threshold, bool ok) {
    assertions.push_back({{"name", name}, {"threshold", threshold}, {"value", value}, {"passed", ok}});
    passed = passed && ok;
  }
  void check_le(const std::string& name, double value, std::optional<double> threshold) {
    if (threshold) check(name, value, *threshold, value <= *threshold);
  }
};

/// Every flag of every command; unused ones keep their defaults.
struct Options {
  std::string problem;
  std::string out;
  std::uint64_t seed = 1;
  int samples = 200;
  std::string region;
  double tol = 1e-6;
  bool fd = false;

  std::optional<double> assert_residual, assert_value, assert_drift, assert_work, assert_curl,
      assert_max_deviation;
  std::string assert_class;

  std::vector<std::string> v;
  std::string f;
  std::string path;
  bool reverse = false;
  std::string x0, v0;
  std::vector<std::string> targets;
  double t_end = 1.0;
  std::string method = "dopri45";
  double h = 1e-3;
  double atol = 1e-9;
  double rtol = 1e-9;
  double s_max = 2.0;
  double arclength = 1.0;
  bool stop_at_boundary = false;
  double delta = 0.0;
  double eps = 0.1;
  int refine = 1;
};

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json residual_json(const ResidualReport& r) {
  return {{"max", r.max}, {"rms", r.rms}, {"min", r.min}, {"worst_point", vec_json(r.worst_point)},
          {"samples", r.samples}};
}

Eigen::VectorXd parse_point(const std::string& text, int dim, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(flag + ": '" + item + "' is not a number");
    }
  }
  if (static_cast<int>(values.size()) != dim) {
    throw InputError(flag + ": expected " + std::to_string(dim) + " comma-separated numbers");
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), dim);
}

Eigen::VectorXd required_point(const std::string& text, int dim, const std::string& flag) {
  if (text.empty()) throw InputError(flag + " is required");
  return parse_point(text, dim, flag);
}

Region pick_region(const ProblemFile& p, const Options& o, const CLI::App& app) {
  if (o.region.empty()) return Region{p.domain, QuasiRandomPlan{o.samples, o.seed}};
  const auto it = p.regions.find(o.region);
  if (it == p.regions.end()) throw InputError("--region: no region named '" + o.region + "'");
  Region r = it->second;
  if (auto* q = std::get_if<QuasiRandomPlan>(&r.plan)) {
    if (app.count("--samples")) q->count = o.samples;
    if (app.count("--seed")) q->seed = o.seed;
  }
  return r;
}

const ScalarField& need_potential(const ProblemFile& p, const std::string& name) {
  const ScalarField* s = p.potential(name);
  if (!s) throw InputError("problem declares no potential " + name);
  return *s;
}

PotentialSet potential_set(const ProblemFile& p) {
  PotentialSet set{need_potential(p, "U"), need_potential(p, "V"), std::nullopt};
  if (const ScalarField* w = p.potential("W")) set.W = *w;
  return set;
}

ScalarField bind_scalar(const ProblemFile& p, const std::string& src) {
  return ScalarField::parse(src, p.dimension, p.constants, p.domain);
}

std::vector<std::string> invariant_sources(const ProblemFile& p, const Options& o) {
  if (!o.v.empty()) return o.v;
  if (!p.v_candidates.empty()) return p.v_candidates;
  if (p.potential_sources.count("V")) return {p.potential_sources.at("V")};
  throw InputError("--v is required (the problem has no V or v_candidates)");
}

SimConfig sim_config(const ProblemFile& p, const Options& o) {
  SimConfig cfg;
  cfg.mass = p.mass;
  cfg.t_end = o.t_end;
  if (o.method == "rk4") {
    cfg.integrator.method = OdeMethod::rk4;
  } else if (o.method != "dopri45") {
    throw InputError("--method must be rk4 or dopri45");
  }
  cfg.integrator.step = o.h;
  cfg.integrator.atol = o.atol;
  cfg.integrator.rtol = o.rtol;
  validate(cfg);
  return cfg;
}

std::vector<std::string> axis_names(int dim) { return coordinate_names(dim); }

Series trajectory_series(const Trajectory& traj) {
  Series s{"trajectory", {"t"}, {}};
  const auto names = axis_names(traj.dimension);
  for (const auto& n : names) s.header.push_back(n);
  for (const auto& n : names) s.header.push_back("v" + n);
  s.header.push_back("K");
  s.header.push_back("Wcum");
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    std::vector<double> row{traj.states[i].t};
    for (int k = 0; k < traj.dimension; ++k) row.push_back(traj.states[i].x(k));
    for (int k = 0; k < traj.dimension; ++k) row.push_back(traj.states[i].v(k));
    row.push_back(traj.kinetic[i]);
    row.push_back(traj.work[i]);
    s.rows.push_back(std::move(row));
  }
  return s;
}

json trajectory_json(const Trajectory& traj) {
  json j{{"samples", traj.states.size()},
         {"accepted_steps", traj.stats.accepted},
         {"rejected_steps", traj.stats.rejected},
         {"t_final", traj.states.empty() ? 0.0 : traj.states.back().t},
         {"work_energy_residual", work_energy_residual(traj)},
         {"exited_domain", traj.exited_domain}};
  if (traj.exited_domain) j["exit_point"] = vec_json(traj.exit_point);
  return j;
}

// ---- commands --------------------------------------------------------------

void cmd_classify(const ProblemFile& p, const Options& o, const CLI::App& app, Report& r) {
  ClassifyThresholds th;
  if (o.fd) th.mode = DiffMode::fd;
  const auto c = classify(p.field(), pick_region(p, o, app), th);
  r.results = {{"class", std::string(to_string(c.canonical_class))},
               {"curl_statistic", c.curl_statistic},
               {"scale", c.scale},
               {"samples", c.samples}};
  if (c.helicity_statistic) r.results["helicity_statistic"] = *c.helicity_statistic;
  if (!o.assert_class.empty()) {
    const bool ok = o.assert_class == to_string(c.canonical_class);
    r.assertions.push_back({{"name", "class"},
                            {"expected", o.assert_class},
                            {"value", std::string(to_string(c.canonical_class))},
                            {"passed", ok}});
    r.passed = r.passed && ok;
  }
}

void cmd_verify(const ProblemFile& p, const Options& o, const CLI::App& app, Report& r) {
  const auto res = verify_representation(p.field(), potential_set(p), pick_region(p, o, app));
  r.results = {{"representation", residual_json(res)}};
  r.check_le("residual", res.max, o.assert_residual);
}

void cmd_vpde(const ProblemFile& p, const Options& o, const CLI::App& app, Report& r) {
  const Region region = pick_region(p, o, app);
  json list = json::array();
  double worst = 0.0;
  for (const auto& src : invariant_sources(p, o)) {
    const auto res = vpde_residual(p.field(), bind_scalar(p, src), region);
    list.push_back({{"v", src}, {"residual", residual_json(res)}});
    worst = std::max(worst, res.max);
  }
  r.results = {{"vpde", list}};
  r.check_le("residual", worst, o.assert_residual);
}

void cmd_gauge(const ProblemFile& p, const Options& o, const CLI::App& app, Report& r) {
  if (o.f.empty()) throw InputError("--f is required");
  std::set<std::string> names;
  for (const auto& [k, v] : p.constants) names.insert(k);
  const SyntaxTree f = parse(o.f, std::vector<std::string>{"u"}, names);
  const Region region = pick_region(p, o, app);
  const PotentialSet next = gauge_transform(potential_set(p), f, p.constants, region);
  const auto res = verify_representation(p.field(), next, region);
  r.results = {{"f", o.f},
               {"U", print(next.U.expression().tree())},
               {"V", print(next.V.expression().tree())},
               {"representation", residual_json(res)}};
  r.check_le("residual", res.max, o.assert_residual);
}

void cmd_decompose3d(const ProblemFile& p, const Options& o, const CLI::App& app, Report& r) {
  if (p.dimension != 3) throw InputError("decompose3d needs a 3D problem");
  const Region region = pick_region(p, o, app);
  std::vector<DecompositionResult> parts;
  json list = json::array();
  double worst_curl = 0.0, worst_residual = 0.0;
  for (const auto& src : invariant_sources(p, o)) {
    parts.push_back(decompose3d(p.field(), bind_scalar(p, src), region));
    const auto& d = parts.back();
    list.push_back({{"v", src},
                    {"sum", residual_json(d.sum_residual)},
                    {"curl_conservative", residual_json(d.curl_conservative)},
                    {"gauge", residual_json(d.gauge)},
                    {"curl_agreement", residual_json(d.curl_agreement)},
                    {"scale", d.scale}});
    worst_curl = std::max(worst_curl, d.curl_conservative.max);
    worst_residual = std::max({worst_residual, d.sum_residual.max, d.gauge.max});
  }
  r.results = {{"decompositions", list}};
  if (parts.size() > 1) {
    json eq = json::array();
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto res = equivalence_residual(parts[0].decomposition, parts[i].decomposition, region);
      eq.push_back({{"a", 0}, {"b", i}, {"residual", residual_json(res)}});
      worst_curl = std::max(worst_curl, res.max);
    }
    r.results["equivalence"] = eq;
  }
  r.check_le("curl", worst_curl, o.assert_curl);
  r.check_le("residual", worst_residual, o.assert_residual);
}

void cmd_characteristics(const ProblemFile& p, const Options& o, const CLI::App&, Report& r) {
  if (p.dimension != 3) throw InputError("characteristics needs a 3D problem");
  const Eigen::VectorXd x0 = required_point(o.x0, 3, "--x0");
  json list = json::array();
  double worst = 0.0;
  for (const auto& src : invariant_sources(p, o)) {
    const double dev = characteristic_deviation(p.field(), bind_scalar(p, src), x0, o.s_max);
    list.push_back({{"v", src}, {"max_deviation", dev}});
    worst = std::max(worst, dev);
  }
  r.results = {{"x0", vec_json(x0)}, {"s_max", o.s_max}, {"characteristics", list}};
  r.check_le("max-deviation", worst, o.assert_max_deviation);
}

void cmd_simulate(const ProblemFile& p, const Options& o, const CLI::App&, Report& r) {
  const Eigen::VectorXd x0 = required_point(o.x0, p.dimension, "--x0");
  const Eigen::VectorXd v0 = required_point(o.v0, p.dimension, "--v0");
  const Trajectory traj = integrate(p.field(), x0, v0, sim_config(p, o));
  r.results = trajectory_json(traj);
  r.series.push_back(trajectory_series(traj));
  r.check_le("work", work_energy_residual(traj), o.assert_work);
}

void cmd_work(const ProblemFile& p, const Options& o, bool surface, Report& r) {
  if (o.path.empty()) throw InputError("--path is required");
  const auto it = p.paths.find(o.path);
  if (it == p.paths.end()) throw InputError("--path: no path named '" + o.path + "'");
  const ParamPath path = o.reverse ? reverse_path(it->second) : it->second;
  const WorkResult w = surface ? stokes_work(p.field(), path) : line_work(p.field(), path);
  r.results = {{"path", o.path},
               {"reversed", o.reverse},
               {"value", w.value},
               {"error_estimate", w.error_estimate},
               {"segments", w.segments}};
  if (o.assert_value) {
    r.check("value", w.value, *o.assert_value, std::abs(w.value - *o.assert_value) <= o.tol);
    r.assertions.back()["tol"] = o.tol;
  }
}

AuxiliaryProblem auxiliary_problem(const ProblemFile& p, const Region& region) {
  AuxiliaryProblem prob{p.field(), potential_set(p), p.mass, 0.0};
  prob.v_floor = default_v_floor(prob.potentials.V, region);
  return prob;
}

void cmd_auxiliary(const ProblemFile& p, const Options& o, const CLI::App& app, Report& r) {
  const Eigen::VectorXd x0 = required_point(o.x0, p.dimension, "--x0");
  const Eigen::VectorXd v0 = required_point(o.v0, p.dimension, "--v0");
  const auto run = auxiliary_trajectory(auxiliary_problem(p, pick_region(p, o, app)), x0, v0,
                                        sim_config(p, o));
  r.results = trajectory_json(run.trajectory);
  r.results["hamiltonian_drift"] = run.drift;
  if (!run.hamiltonian.empty()) r.results["H0"] = run.hamiltonian.front();
  Series s = trajectory_series(run.trajectory);
  s.header.back() = "H";
  s.header.erase(s.header.end() - 2);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    s.rows[i].pop_back();
    s.rows[i].back() = run.hamiltonian[i];
  }
  r.series.push_back(std::move(s));
  r.check_le("drift", run.drift, o.assert_drift);
}

void cmd_nonlocal(const ProblemFile& p, const Options& o, const CLI::App& app, Report& r) {
  const Eigen::VectorXd x0 = required_point(o.x0, p.dimension, "--x0");
  const Eigen::VectorXd v0 = required_point(o.v0, p.dimension, "--v0");
  const Trajectory traj = integrate(p.field(), x0, v0, sim_config(p, o));
  const auto series = nonlocal_hamiltonian_series(traj, auxiliary_problem(p, pick_region(p, o, app)),
                                                  SeriesOptions{o.refine});
  r.results = trajectory_json(traj);
  r.results["hamiltonian_drift"] = series.drift;
  r.results["truncated"] = series.truncated;
  r.results["series_samples"] = series.t.size();
  Series s{"series", {"t"}, {}};
  const auto names = axis_names(p.dimension);
  for (const auto& n : names) s.header.push_back("pbar_" + n);
  for (const auto& n : names) s.header.push_back("xbar_" + n);
  s.header.push_back("H");
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    std::vector<double> row{series.t[i]};
    for (int k = 0; k < p.dimension; ++k) row.push_back(series.pbar[i](k));
    for (int k = 0; k < p.dimension; ++k) row.push_back(series.xbar[i](k));
    row.push_back(series.H[i]);
    s.rows.push_back(std::move(row));
  }
  r.series.push_back(std::move(s));
  r.check_le("drift", series.drift, o.assert_drift);
}

void cmd_trace2d(const ProblemFile& p, const Options& o, const CLI::App&, Report& r) {
  if (p.dimension != 2) throw InputError("trace2d needs a 2D problem");
  const Eigen::VectorXd x0 = required_point(o.x0, 2, "--x0");
  TraceOptions opts;
  opts.stop_at_boundary = o.stop_at_boundary;
  const auto trace = zero_work_trace_2d(p.field(), x0, o.arclength, opts);
  const WorkResult w = line_work(p.field(), trace.path);
  r.results = {{"x0", vec_json(x0)},
               {"arclength", o.arclength},
               {"nodes", trace.nodes.size()},
               {"hit_boundary", trace.hit_boundary},
               {"work", w.value}};
  if (const ScalarField* u = p.potential("U")) {
    const double u0 = value(*u, x0);
    double dev = 0.0;
    for (int i = 0; i <= 1000; ++i) dev = std::max(dev, std::abs(value(*u, trace.path.point(i / 1000.0)) - u0));
    r.results["u_deviation"] = dev;
  }
  Series s{"path", {"s", "x", "y"}, {}};
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    s.rows.push_back({trace.arclength[i], trace.nodes[i](0), trace.nodes[i](1)});
  }
  r.series.push_back(std::move(s));
  r.check_le("work", std::abs(w.value), o.assert_work);
}

void cmd_reach2d(const ProblemFile& p, const Options& o, const CLI::App&, Report& r) {
  if (p.dimension != 2) throw InputError("reach2d needs a 2D problem");
  const Eigen::VectorXd x0 = required_point(o.x0, 2, "--x0");
  if (o.targets.empty()) throw InputError("--target is required");
  std::vector<Eigen::VectorXd> targets;
  for (const auto& t : o.targets) targets.push_back(parse_point(t, 2, "--target"));
  const auto verdicts = reachability_report_2d(p.field(), x0, targets, o.delta);
  json list = json::array();
  for (const auto& v : verdicts) {
    list.push_back({{"target", vec_json(v.target)}, {"distance", v.distance}, {"reachable", v.reachable}});
  }
  r.results = {{"x0", vec_json(x0)}, {"verdicts", list}};
}

void cmd_maneuver3d(const ProblemFile& p, const Options& o, const CLI::App&, Report& r) {
  if (p.dimension != 3) throw InputError("maneuver3d needs a 3D problem");
  const Eigen::VectorXd x0 = required_point(o.x0, 3, "--x0");
  const auto m = bracket_maneuver_3d(p.field(), x0, o.eps);
  r.results = {{"x0", vec_json(x0)},
               {"epsilon", m.epsilon},
               {"endpoint", vec_json(m.endpoint)},
               {"displacement", vec_json(m.displacement)},
               {"transverse", m.transverse},
               {"work", m.work}};
  Series s{"path", {"x", "y", "z"}, {}};
  for (const auto& q : m.path) s.rows.push_back({q(0), q(1), q(2)});
  r.series.push_back(std::move(s));
  r.check_le("work", std::abs(m.work), o.assert_work);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw NumericalError("cannot write " + path.string());
  fill(f);
  f.flush();
  if (!f) throw NumericalError("write failed for " + path.string());
}

void publish(const Report& r, const std::string& digest, const Options& o, std::ostream& out) {
  json doc{{"command", r.command},
           {"tool_version", kToolVersion},
           {"inputs_digest", digest},
           {"results", r.results},
           {"assertions", r.assertions},
           {"passed", r.passed},
           {"timestamp", utc_timestamp()}};
  json names = json::array();
  for (const auto& s : r.series) names.push_back(s.name);
  if (!r.series.empty()) doc["series"] = names;

  if (o.out.empty()) {
    out << doc.dump(2) << '\n';
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec) throw NumericalError("cannot create " + o.out + ": " + ec.message());
  const std::filesystem::path dir(o.out);
  write_file(dir / (r.command + ".json"), [&](std::ostream& f) { f << doc.dump(2) << '\n'; });
  for (const auto& s : r.series) {
    write_file(dir / (r.command + "_" + s.name + ".csv"),
               [&](std::ostream& f) { emit_series(f, s.header, s.rows); });
  }
}

using Handler = std::function<void(const ProblemFile&, const Options&, const CLI::App&, Report&)>;

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curl-force field analysis"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"classify", "Canonical class of the work form over a region"},
      {"verify", "Residual of F + V grad U + grad W"},
      {"vpde", "Residual of grad V x F - V curl F"},
      {"gauge", "Gauge transform (U, V) -> (f(U), V / f'(U)) and re-verify"},
      {"decompose3d", "Conservative / non-conservative split for each V"},
      {"characteristics", "Invariance of V along the curl field lines"},
      {"simulate", "Particle trajectory with kinetic energy and cumulative work"},
      {"work", "Line integral of F along a named path"},
      {"stokes", "Flux of curl F through a named planar polygon"},
      {"auxiliary", "Motion under (F + grad W) / V with the auxiliary Hamiltonian"},
      {"nonlocal-h", "Nonlocal Hamiltonian series along a physical trajectory"},
      {"trace2d", "Zero-work curve through a point"},
      {"reach2d", "Zero-work reachability of target points"},
      {"maneuver3d", "Bracket maneuver in the kernel planes"},
  };
  const std::map<std::string, Handler> handlers{
      {"classify", cmd_classify},
      {"verify", cmd_verify},
      {"vpde", cmd_vpde},
      {"gauge", cmd_gauge},
      {"decompose3d", cmd_decompose3d},
      {"characteristics", cmd_characteristics},
      {"simulate", cmd_simulate},
      {"work", [](const ProblemFile& p, const Options& opt, const CLI::App&, Report& r) { cmd_work(p, opt, false, r); }},
      {"stokes", [](const ProblemFile& p, const Options& opt, const CLI::App&, Report& r) { cmd_work(p, opt, true, r); }},
      {"auxiliary", cmd_auxiliary},
      {"nonlocal-h", cmd_nonlocal},
      {"trace2d", cmd_trace2d},
      {"reach2d", cmd_reach2d},
      {"maneuver3d", cmd_maneuver3d},
  };

  std::vector<CLI::App*> subs;
  for (const auto& [name, about] : commands) {
    CLI::App* sub = app.add_subcommand(name, about);
    subs.push_back(sub);
    sub->add_option("problem", o.problem, "Problem file (JSON)")->required();
    sub->add_option("--out", o.out, "Directory for the report and CSV series");
    sub->add_option("--seed", o.seed, "Seed of the quasi-random sample plan");
    sub->add_option("--samples", o.samples, "Number of quasi-random samples")->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "Tolerance for --assert-value");

    const bool sampled = name == "classify" || name == "verify" || name == "vpde" || name == "gauge" ||
                         name == "decompose3d" || name == "auxiliary" || name == "nonlocal-h";
    if (sampled) sub->add_option("--region", o.region, "Named region of the problem file");
    if (name == "classify") {
      sub->add_flag("--fd", o.fd, "Central differences instead of automatic differentiation");
      sub->add_option("--assert-class", o.assert_class, "Expected canonical class");
    }
    if (name == "verify" || name == "vpde" || name == "gauge" || name == "decompose3d") {
      sub->add_option("--assert-residual", o.assert_residual, "Upper bound on the max residual");
    }
    if (name == "vpde" || name == "decompose3d" || name == "characteristics") {
      sub->add_option("--v", o.v, "Invariant expression (repeatable)");
    }
    if (name == "decompose3d") sub->add_option("--assert-curl", o.assert_curl, "Upper bound on curl F_c");
    if (name == "gauge") sub->add_option("--f", o.f, "Gauge function of u");
    if (name == "characteristics") {
      sub->add_option("--x0", o.x0, "Start point x,y,z");
      sub->add_option("--s-max", o.s_max, "Parameter length");
      sub->add_option("--assert-max-deviation", o.assert_max_deviation, "Upper bound on |V - V(x0)|");
    }
    if (name == "simulate" || name == "auxiliary" || name == "nonlocal-h") {
      sub->add_option("--x0", o.x0, "Initial position, comma separated");
      sub->add_option("--v0", o.v0, "Initial velocity, comma separated");
      sub->add_option("--t-end", o.t_end, "Final time");
      sub->add_option("--method", o.method, "rk4 or dopri45");
      sub->add_option("--step", o.h, "rk4 step");
      sub->add_option("--atol", o.atol, "dopri45 absolute tolerance");
      sub->add_option("--rtol", o.rtol, "dopri45 relative tolerance");
    }
    if (name == "simulate") sub->add_option("--assert-work", o.assert_work, "Upper bound on max |dK - W|");
    if (name == "auxiliary" || name == "nonlocal-h") {
      sub->add_option("--assert-drift", o.assert_drift, "Upper bound on the Hamiltonian drift");
    }
    if (name == "nonlocal-h") sub->add_option("--refine", o.refine, "Samples per step")->check(CLI::PositiveNumber);
    if (name == "work" || name == "stokes") {
      sub->add_option("--path", o.path, "Named path of the problem file");
      sub->add_option("--assert-value", o.assert_value, "Expected work (see --tol)");
    }
    if (name == "work") sub->add_flag("--reverse", o.reverse, "Traverse the path backwards");
    if (name == "trace2d") {
      sub->add_option("--x0", o.x0, "Start point x,y");
      sub->add_option("--arclength", o.arclength, "Arclength in each direction");
      sub->add_flag("--stop-at-boundary", o.stop_at_boundary, "Clip at the domain boundary");
      sub->add_option("--assert-work", o.assert_work, "Upper bound on |work| along the curve");
    }
    if (name == "reach2d") {
      sub->add_option("--x0", o.x0, "Start point x,y");
      sub->add_option("--target", o.targets, "Target point x,y (repeatable)");
      sub->add_option("--delta", o.delta, "Distance tolerance (0: automatic)");
    }
    if (name == "maneuver3d") {
      sub->add_option("--x0", o.x0, "Start point x,y,z");
      sub->add_option("--eps", o.eps, "Flow time of each leg")->check(CLI::PositiveNumber);
      sub->add_option("--assert-work", o.assert_work, "Upper bound on |work|");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  const CLI::App* chosen = nullptr;
  for (const CLI::App* s : subs) {
    if (s->parsed()) chosen = s;
  }
  Report report;
  report.command = chosen->get_name();

  try {
    const ProblemFile problem = load_problem(o.problem);
    std::string fingerprint = problem.canonical_json;
    // The output location is not an input.
    for (int i = 1; i < argc; ++i) {
      const std::string_view arg = argv[i];
      if (arg == "--out") {
        ++i;
        continue;
      }
      if (arg.rfind("--out=", 0) == 0) continue;
      fingerprint += '\n';
      fingerprint += arg;
    }
    handlers.at(report.command)(problem, o, *chosen, report);
    publish(report, fnv1a_hex(fingerprint), o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::usage: return exit_usage;
      case ErrorCategory::input: return exit_input;
      case ErrorCategory::numerical: return exit_numerical;
    }
  }
  if (!report.passed) {
    err << "assertion failed\n";
    return exit_assertion;
  }
  return exit_ok;
}

}  // namespace curlforce::cli
