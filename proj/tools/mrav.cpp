// mrav: hoverability analysis of multi-rotor platforms from the command line.
//
// Exit codes: 0 success, 1 domain infeasibility (no hover where one is
// required, cannot lift, diverged), 2 input or usage error.

#include "mrav/mrav.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#ifndef MRAV_VERSION
#define MRAV_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace mrav;

namespace {

constexpr int kExitInfeasible = 1;
constexpr int kExitInput = 2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- number formatting ----------------------------------------------------

std::string fmt12(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(fmt12(x));
}

json vec(const Eigen::Ref<const VecX>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

json mat(const MatX& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec(m.row(r).transpose()));
  return a;
}

std::string csv_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt12(x);
}

// ---- report ---------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct Report {
  json result = json::object();
  std::optional<CsvTable> table;  // set when the subcommand has a tabular form
  std::vector<std::string> warnings;
  int exit_code = 0;
};

// ---- options --------------------------------------------------------------

struct Options {
  std::string preset, config, config_pos;
  std::optional<double> mass;
  std::vector<std::string> umax, u_rate, angle_rate;
  std::optional<int> resolution;
  double rank_tol = kDefaultRankTol;
  int threads = 1;
  std::string format = "json";
  std::string output;
  bool timing = false;

  std::optional<double> phi, theta;  // [deg]
  double step = 10.0;                // [deg]
  std::optional<double> cal_target;
  double cal_phi = 90.0, cal_theta = 0.0;

  std::string matrix = "Ared";

  std::string experiment = "moment-step";
  std::string axis = "x";
  double magnitude = 1.5;
  double angle = 5.0;  // [deg]
  double duration = 1.0, dt = 1e-3;
  double gain = 50.0;
  int every = 1;
  bool summary = false;
};

std::string source_path(const Options& o) { return o.config.empty() ? o.config_pos : o.config; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// "x" applies to every propeller, "i:x" to propeller i.
void apply_override(PlatformSpec& p, const std::vector<std::string>& items, const std::string& flag,
                    double PropellerSpec::*field) {
  for (const auto& s : items) {
    const auto colon = s.find(':');
    try {
      if (colon == std::string::npos) {
        const double v = std::stod(s);
        for (auto& q : p.propellers) q.*field = v;
      } else {
        const int i = std::stoi(s.substr(0, colon));
        if (i < 0 || i >= static_cast<int>(p.propellers.size()))
          throw InputError(flag + ": propeller index " + std::to_string(i) + " out of range");
        p.propellers[static_cast<std::size_t>(i)].*field = std::stod(s.substr(colon + 1));
      }
    } catch (const std::logic_error&) {
      throw InputError(flag + ": cannot parse '" + s + "' (expected x or i:x)");
    }
  }
}

PlatformSpec load_unchecked(const Options& o) {
  const std::string path = source_path(o);
  if (o.preset.empty() == path.empty()) throw InputError("give exactly one of --preset or a config file");
  PlatformSpec p = o.preset.empty() ? load_platform(read_file(path)) : preset(o.preset);
  if (o.mass) p.mass = *o.mass;
  apply_override(p, o.umax, "--umax", &PropellerSpec::u_max);
  apply_override(p, o.u_rate, "--u-rate", &PropellerSpec::u_rate_max);
  apply_override(p, o.angle_rate, "--angle-rate", &PropellerSpec::angle_rate_max);
  validate_platform(p);
  return p;
}

/// A platform that breaks a definition invariant is bad input, not a domain outcome.
PlatformSpec load(const Options& o) {
  try {
    return load_unchecked(o);
  } catch (const InvariantError& e) {
    throw InputError(e.what());
  }
}

HoverOptions hover_options(const Options& o) {
  if (!(o.rank_tol > 0)) throw InputError("--rank-tol must be positive");
  if (o.threads < 1) throw InputError("--threads must be >= 1");
  HoverOptions h;
  h.rank_tol = o.rank_tol;
  h.sets.rank_tol = o.rank_tol;
  h.sets.threads = o.threads;
  return h;
}

int resolution(const Options& o, int fallback) {
  const int r = o.resolution.value_or(fallback);
  if (r < 2) throw InputError("--resolution must be >= 2");
  return r;
}

json manifest(const std::string& sub, const Options& o, double seconds) {
  json m;
  m["tool"] = "mrav";
  m["version"] = MRAV_VERSION;
  m["subcommand"] = sub;
  json src = nullptr;
  if (!o.preset.empty())
    src = {{"preset", o.preset}};
  else if (!source_path(o).empty())
    src = {{"config", source_path(o)}};
  m["source"] = src;
  json ov = json::object();
  if (o.mass) ov["mass"] = num(*o.mass);
  if (!o.umax.empty()) ov["umax"] = o.umax;
  if (!o.u_rate.empty()) ov["u_rate"] = o.u_rate;
  if (!o.angle_rate.empty()) ov["angle_rate"] = o.angle_rate;
  if (o.resolution) ov["resolution"] = *o.resolution;
  if (o.rank_tol != kDefaultRankTol) ov["rank_tol"] = num(o.rank_tol);
  m["overrides"] = ov;
  m["outputs"] = o.output.empty() ? json::array() : json::array({o.output});
  if (o.timing) m["duration_s"] = num(seconds);
  return m;
}

// ---- shared result pieces -------------------------------------------------

json control_json(const PlatformSpec& p, const ControlInput& h) {
  json a = json::array();
  const auto idx = p.active();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& q = p.propellers[static_cast<std::size_t>(idx[j])];
    json c;
    c["propeller"] = idx[j];
    c["u"] = num(h.props[j].u);
    if (q.tilt.num_angles() >= 1) c["alpha"] = num(h.props[j].alpha);
    if (q.tilt.num_angles() == 2) c["beta"] = num(h.props[j].beta);
    a.push_back(c);
  }
  return a;
}

json hover_json(const PlatformSpec& p, const HoverSolution& s) {
  json j;
  j["status"] = to_string(s.status);
  j["orientation"] = mat(s.orientation);
  if (s.feasible()) {
    j["control"] = control_json(p, s.control);
    j["reduced_input"] = vec(s.reduced_input);
  } else {
    j["control"] = nullptr;
    j["reduced_input"] = nullptr;
  }
  j["force_error"] = s.feasible() ? num(s.force_error) : json(nullptr);
  j["moment_error"] = s.feasible() ? num(s.moment_error) : json(nullptr);
  return j;
}

double max_thrust_ratio(const PlatformSpec& p, const ControlInput& h) {
  double r = 0.0;
  const auto idx = p.active();
  for (std::size_t j = 0; j < idx.size(); ++j) r = std::max(r, h.props[j].u / p.propellers[static_cast<std::size_t>(idx[j])].u_max);
  return r;
}

/// Hover witness at --phi/--theta when given, else the capability witness.
HoverSolution witness(const PlatformSpec& p, const Options& o, const HoverOptions& h) {
  if (o.phi.has_value() != o.theta.has_value()) throw InputError("--phi and --theta go together");
  if (o.phi) {
    auto s = solve_hover(p, orientation_from_phi_theta(deg2rad(*o.phi), deg2rad(*o.theta)), h);
    if (!s.feasible()) throw InvariantError("hover", "no hover solution at the requested orientation");
    return s;
  }
  const auto cap = can_statically_hover(p, h);
  if (!cap.capable || !cap.witness) throw InvariantError("hover", "platform cannot statically hover");
  return *cap.witness;
}

std::string column_name(const PlatformSpec& p, const ColumnTag& t) {
  (void)p;
  const std::string i = std::to_string(t.propeller);
  switch (t.kind) {
    case ColumnKind::Component: return "v" + i + "_" + std::to_string(t.component);
    case ColumnKind::Thrust: return "u" + i;
    case ColumnKind::Alpha: return "alpha" + i;
    case ColumnKind::Beta: return "beta" + i;
  }
  return "?";
}

/// Applies --calibrate: scales mass, u_max and u_rate_max so the LHI at
/// (cal_phi, cal_theta) equals the target.
PlatformSpec maybe_calibrate(const PlatformSpec& p, const Options& o, const DirectionGrid& grid,
                             const HoverOptions& h, json& out) {
  if (!o.cal_target) return p;
  if (!(*o.cal_target > 0)) throw InputError("--calibrate must be positive");
  const auto c = calibrate_lhi(p, deg2rad(o.cal_phi), deg2rad(o.cal_theta), *o.cal_target, grid, h);
  json j;
  j["target"] = num(*o.cal_target);
  j["phi_deg"] = num(o.cal_phi);
  j["theta_deg"] = num(o.cal_theta);
  j["reference_lhi"] = num(c.reference_lhi);
  j["scale"] = num(c.scale);
  j["mass"] = num(c.platform.mass);
  out["calibration"] = j;
  return c.platform;
}

// ---- subcommands ----------------------------------------------------------

Report cmd_presets() {
  Report r;
  CsvTable t{{"name", "propellers", "dof", "mass"}, {}};
  json a = json::array();
  for (const auto& n : preset_names()) {
    const auto p = preset(n);
    json e;
    e["name"] = n;
    e["propellers"] = p.propellers.size();
    e["functional"] = p.num_active();
    e["dof"] = p.dof();
    e["mass"] = num(p.mass);
    json kinds = json::array();
    for (const auto& q : p.propellers) kinds.push_back(to_string(q.tilt.kind));
    e["tilt"] = kinds;
    a.push_back(e);
    t.add({n, std::to_string(p.propellers.size()), std::to_string(p.dof()), csv_num(p.mass)});
  }
  r.result["presets"] = a;
  r.table = t;
  return r;
}

Report cmd_analyze(const PlatformSpec& p, const Options& o) {
  auto h = hover_options(o);
  h.odl_resolution = resolution(o, 2048);
  const auto c = classify(p, h);
  Report r;
  auto& j = r.result;
  j["platform"] = p.name;
  j["class"] = to_string(c.cls);
  j["csh"] = c.csh;
  j["ranks"] = {{"a", c.rank_a}, {"af", c.rank_af}, {"af_full", c.rank_af_full}, {"am", c.rank_am}};
  j["dof"] = c.dof;
  j["weight"] = num(c.weight);
  j["odl"] = (c.rank_af == 3 && c.rank_a == 6) ? num(c.odl) : json(nullptr);
  j["hover_capable"] = c.witness.has_value();
  j["witness"] = c.witness ? hover_json(p, *c.witness) : json(nullptr);
  return r;
}

Report cmd_hover_solve(const PlatformSpec& p, const Options& o) {
  const auto s = solve_hover(p, orientation_from_phi_theta(deg2rad(o.phi.value_or(0.0)), deg2rad(o.theta.value_or(0.0))),
                             hover_options(o));
  Report r;
  r.result["phi_deg"] = num(o.phi.value_or(0.0));
  r.result["theta_deg"] = num(o.theta.value_or(0.0));
  r.result["hover"] = hover_json(p, s);
  if (!s.feasible()) {
    r.warnings.push_back("no hover solution at this orientation");
    r.exit_code = kExitInfeasible;
  }
  return r;
}

Report cmd_hover_map(const PlatformSpec& p, const Options& o) {
  if (!(o.step > 0) || o.step > 360) throw InputError("--step must be in (0, 360]");
  const auto cells = hover_orientation_set(p, o.step, hover_options(o));
  Report r;
  CsvTable t{{"phi_deg", "theta_deg", "status", "max_thrust_ratio"}, {}};
  json a = json::array();
  int feasible = 0;
  for (const auto& c : cells) {
    const double ratio = c.solution.feasible() ? max_thrust_ratio(p, c.solution.control) : kNaN;
    feasible += c.solution.feasible();
    a.push_back({{"phi_deg", num(c.phi_deg)},
                 {"theta_deg", num(c.theta_deg)},
                 {"status", to_string(c.solution.status)},
                 {"max_thrust_ratio", num(ratio)}});
    t.add({csv_num(c.phi_deg), csv_num(c.theta_deg), to_string(c.solution.status), csv_num(ratio)});
  }
  r.result["step_deg"] = num(o.step);
  r.result["feasible_cells"] = feasible;
  r.result["cells"] = a;
  r.table = t;
  return r;
}

Report cmd_odl(const PlatformSpec& p, const Options& o) {
  const auto h = hover_options(o);
  Report r;
  const int rank = hover_force_rank(reduced_allocation(p), h.rank_tol);
  const auto res = odl(p, resolution(o, 2048), h.sets);
  if (rank < 3)
    r.warnings.push_back("zero-moment force set has rank " + std::to_string(rank) +
                         "; odl is 0 (thrust cannot point in every direction)");
  auto& j = r.result;
  j["odl"] = num(rank < 3 ? 0.0 : res.odl);
  j["force_rank"] = rank;
  j["weight"] = num(p.weight());
  j["lifts_weight"] = rank == 3 && res.odl >= p.weight();
  j["min_direction"] = vec(res.min_direction);
  j["directions"] = res.directions;
  return r;
}

Report cmd_force_set(const PlatformSpec& p, const Options& o) {
  const auto h = hover_options(o);
  const auto vm = build_vertex_model(p, h.sets);
  const auto grid = DirectionGrid::fibonacci(resolution(o, 2048));
  const auto sup = force_support_on_grid(vm, grid, h.sets.threads);
  Report r;
  CsvTable t{{"dx", "dy", "dz", "support", "fx", "fy", "fz"}, {}};
  json a = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3& d = sup.dirs[i];
    const Vec3& f = sup.cloud.points[i];
    a.push_back({{"direction", vec(d)}, {"support", num(sup.values[i])}, {"point", vec(f)}});
    t.add({csv_num(d.x()), csv_num(d.y()), csv_num(d.z()), csv_num(sup.values[i]), csv_num(f.x()), csv_num(f.y()),
           csv_num(f.z())});
  }
  r.result["directions"] = grid.size();
  r.result["samples"] = a;
  r.table = t;
  return r;
}

Report cmd_lhi(const PlatformSpec& p0, const Options& o) {
  const auto h = hover_options(o);
  const auto grid = DirectionGrid::fibonacci(resolution(o, 2048));
  Report r;
  const auto p = maybe_calibrate(p0, o, grid, h, r.result);
  const auto w = witness(p, o, h);
  const auto z = local_moment_zonotope(p, w.control);
  const auto res = lhi(z, grid);
  r.result["lhi"] = num(res.lhi);
  r.result["min_direction"] = vec(res.min_direction);
  r.result["generators"] = z.generators.cols();
  r.result["zonotope_rank"] = numeric_rank(z.generators, h.rank_tol);
  r.result["rank_equivalent"] = rank_equivalence_check(p, w.control, 1e-6, h.rank_tol);
  r.result["frozen_hover"] = fixed_orientation_sustain_check(p, w.control, h);
  r.result["witness"] = hover_json(p, w);
  return r;
}

Report cmd_lhi_map(const PlatformSpec& p0, const Options& o) {
  if (!(o.step > 0) || o.step > 360) throw InputError("--step must be in (0, 360]");
  const auto h = hover_options(o);
  const auto grid = DirectionGrid::fibonacci(resolution(o, 512));
  Report r;
  const auto p = maybe_calibrate(p0, o, grid, h, r.result);
  const auto cells = lhi_map(p, o.step, grid, h);
  CsvTable t{{"phi_deg", "theta_deg", "feasible", "lhi"}, {}};
  json a = json::array();
  double lo = kInf, hi = -kInf;
  for (const auto& c : cells) {
    if (c.feasible) {
      lo = std::min(lo, c.lhi);
      hi = std::max(hi, c.lhi);
    }
    a.push_back({{"phi_deg", num(c.phi_deg)}, {"theta_deg", num(c.theta_deg)}, {"feasible", c.feasible}, {"lhi", num(c.lhi)}});
    t.add({csv_num(c.phi_deg), csv_num(c.theta_deg), c.feasible ? "1" : "0", csv_num(c.lhi)});
  }
  r.result["step_deg"] = num(o.step);
  r.result["lhi_min"] = num(lo);
  r.result["lhi_max"] = num(hi);
  r.result["cells"] = a;
  r.table = t;
  return r;
}

Report cmd_moment_sets(const PlatformSpec& p, const Options& o) {
  const auto h = hover_options(o);
  const int res = resolution(o, 128);
  const auto grid = DirectionGrid::fibonacci(res);
  Report r;
  CsvTable t{{"set", "x", "y", "z"}, {}};

  const auto m = moment_set_at_hover(p, res, h.sets);
  json pts = json::array();
  for (const auto& x : m.points) {
    pts.push_back(vec(x));
    t.add({"hover", csv_num(x.x()), csv_num(x.y()), csv_num(x.z())});
  }
  r.result["hover_set"] = {{"inscribed_radius", num(inscribed_radius(m, grid))}, {"points", pts}};

  const auto w = witness(p, o, h);
  const auto z = local_moment_zonotope(p, w.control);
  json gens = json::array();
  for (Eigen::Index k = 0; k < z.generators.cols(); ++k) {
    const Vec3 g = z.generators.col(k);
    gens.push_back(vec(g));
    t.add({"local_generator", csv_num(g.x()), csv_num(g.y()), csv_num(g.z())});
  }
  r.result["local_set"] = {{"lhi", num(lhi(z, grid).lhi)}, {"generators", gens}, {"witness", hover_json(p, w)}};
  r.table = t;
  return r;
}

Vec3 parse_axis(const std::string& s) {
  if (s == "x") return Vec3::UnitX();
  if (s == "y") return Vec3::UnitY();
  if (s == "z") return Vec3::UnitZ();
  std::stringstream ss(s);
  Vec3 v;
  char c1 = 0, c2 = 0;
  if (!(ss >> v.x() >> c1 >> v.y() >> c2 >> v.z()) || c1 != ',' || c2 != ',' || v.norm() < 1e-12)
    throw InputError("--axis must be x, y, z or a nonzero 'a,b,c'");
  return v.normalized();
}

Report cmd_simulate(const PlatformSpec& p, const Options& o) {
  const auto h = hover_options(o);
  if (!(o.dt > 0) || !(o.duration >= 0)) throw InputError("need --dt > 0 and --duration >= 0");
  if (o.every < 1) throw InputError("--every must be >= 1");
  if (o.phi.has_value() != o.theta.has_value()) throw InputError("--phi and --theta go together");
  const Mat3 r_h = o.phi ? orientation_from_phi_theta(deg2rad(*o.phi), deg2rad(*o.theta)) : witness(p, o, h).orientation;
  ControllerGains gains;
  gains.k = o.gain;
  ExperimentResult res;
  json summary;
  summary["experiment"] = o.experiment;
  if (o.experiment == "moment-step") {
    const Vec3 a = parse_axis(o.axis);
    res = moment_step_experiment(p, r_h, a, o.magnitude, o.duration, o.dt, gains, h);
    summary["axis"] = vec(a);
    summary["magnitude"] = num(o.magnitude);
    summary["rise_time"] = num(res.rise_time);
    summary["early_moment_integral"] = num(res.early_moment_integral);
  } else if (o.experiment == "force-track") {
    res = force_orientation_experiment(p, r_h, deg2rad(o.angle), o.duration, o.dt, gains, h);
    summary["angle_deg"] = num(o.angle);
    summary["settle_time"] = num(res.settle_time);
  } else {
    throw InputError("--experiment must be moment-step or force-track");
  }
  summary["final_error"] = num(res.final_error);
  summary["dt"] = num(o.dt);
  summary["duration"] = num(o.duration);
  summary["gain"] = num(o.gain);
  summary["orientation"] = mat(r_h);

  Report r;
  r.result["summary"] = summary;
  if (o.summary) return r;

  const auto idx = p.active();
  CsvTable t;
  t.header = {"t", "fx", "fy", "fz", "mx", "my", "mz", "fx_d", "fy_d", "fz_d", "mx_d", "my_d", "mz_d",
              "px", "py", "pz", "wx", "wy", "wz"};
  for (std::size_t j = 0; j < idx.size(); ++j) t.header.push_back("u" + std::to_string(idx[j]));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& q = p.propellers[static_cast<std::size_t>(idx[j])];
    if (q.tilt.num_angles() >= 1) t.header.push_back("alpha" + std::to_string(idx[j]));
    if (q.tilt.num_angles() == 2) t.header.push_back("beta" + std::to_string(idx[j]));
  }
  json samples = json::array();
  for (std::size_t i = 0; i < res.samples.size(); i += static_cast<std::size_t>(o.every)) {
    const auto& s = res.samples[i];
    std::vector<std::string> row{csv_num(s.t)};
    for (int k = 0; k < 6; ++k) row.push_back(csv_num(s.applied[k]));
    for (int k = 0; k < 6; ++k) row.push_back(csv_num(s.commanded[k]));
    for (int k = 0; k < 3; ++k) row.push_back(csv_num(s.position[k]));
    for (int k = 0; k < 3; ++k) row.push_back(csv_num(s.angular_velocity[k]));
    for (Eigen::Index k = 0; k < s.h.size(); ++k) row.push_back(csv_num(s.h[k]));
    t.add(std::move(row));
    samples.push_back({{"t", num(s.t)},
                       {"applied", vec(s.applied)},
                       {"commanded", vec(s.commanded)},
                       {"position", vec(s.position)},
                       {"angular_velocity", vec(s.angular_velocity)},
                       {"h", vec(s.h)}});
  }
  r.result["samples"] = samples;
  r.table = t;
  return r;
}

Report cmd_dump_allocation(const PlatformSpec& p, const Options& o) {
  const auto h = hover_options(o);
  AllocationMatrix a;
  if (o.matrix == "A") {
    a = vector_allocation(p);
  } else if (o.matrix == "Ared") {
    a = reduced_allocation(p);
  } else if (o.matrix == "Ffixed" || o.matrix == "F") {
    const auto w = witness(p, o, h);
    a = o.matrix == "F" ? full_jacobian(p, w.control) : fixed_allocation(p, w.control);
  } else {
    throw InputError("--matrix must be A, Ared, Ffixed or F");
  }
  Report r;
  CsvTable t;
  t.header = {"row"};
  json cols = json::array();
  for (const auto& c : a.cols) {
    t.header.push_back(column_name(p, c));
    cols.push_back(column_name(p, c));
  }
  static const char* rows[] = {"fx", "fy", "fz", "mx", "my", "mz"};
  for (Eigen::Index i = 0; i < a.m.rows(); ++i) {
    std::vector<std::string> row{rows[i]};
    for (Eigen::Index k = 0; k < a.m.cols(); ++k) row.push_back(csv_num(a.m(i, k)));
    t.add(std::move(row));
  }
  r.result["matrix"] = o.matrix;
  r.result["rows"] = a.m.rows();
  r.result["cols"] = a.m.cols();
  r.result["rank"] = numeric_rank(a.m, h.rank_tol);
  r.result["columns"] = cols;
  r.result["values"] = mat(a.m);
  r.table = t;
  return r;
}

// ---- emission -------------------------------------------------------------

std::string render(const Report& r, const json& man, const std::string& format, const std::string& sub) {
  if (format == "json") {
    json doc;
    doc["manifest"] = man;
    doc["warnings"] = r.warnings;
    doc["result"] = r.result;
    return doc.dump(2) + "\n";
  }
  if (!r.table) throw InputError("--format csv is not available for " + sub);
  std::string out = "# manifest " + man.dump() + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += "\n";
  };
  line(r.table->header);
  for (const auto& row : r.table->rows) line(row);
  return out;
}

std::string resolve_output(const std::string& path) {
  namespace fs = std::filesystem;
  const char* dir = std::getenv("MRAV_OUTPUT_DIR");
  fs::path p(path);
  if (p.is_relative() && dir && *dir) p = fs::path(dir) / p;
  return p.string();
}

void add_common(CLI::App* sc, Options& o, bool needs_platform) {
  if (needs_platform) {
    sc->add_option("file", o.config_pos, "Platform YAML file");
    sc->add_option("--config,-c", o.config, "Platform YAML file");
    sc->add_option("--preset,-p", o.preset, "Built-in platform")->check(CLI::IsMember(preset_names()));
    sc->add_option("--mass", o.mass, "Mass override [kg]");
    sc->add_option("--umax", o.umax, "Max thrust [N]; x or i:x")->take_all();
    sc->add_option("--u-rate", o.u_rate, "Max thrust rate [N/s]; x or i:x")->take_all();
    sc->add_option("--angle-rate", o.angle_rate, "Max tilt rate [rad/s]; x or i:x")->take_all();
    sc->add_option("--resolution,-n", o.resolution, "Number of sampled directions");
    sc->add_option("--rank-tol", o.rank_tol, "Relative singular value tolerance for ranks");
    sc->add_option("--threads,-j", o.threads, "Worker threads (results do not depend on it)");
  }
  sc->add_option("--format,-f", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sc->add_option("--output,-o", o.output, "Output file (relative paths resolve under $MRAV_OUTPUT_DIR)");
  sc->add_flag("--timing", o.timing, "Record wall-clock duration in the manifest");
}

void add_orientation(CLI::App* sc, Options& o) {
  sc->add_option("--phi", o.phi, "Hover orientation phi [deg]");
  sc->add_option("--theta", o.theta, "Hover orientation theta [deg]");
}

void add_calibration(CLI::App* sc, Options& o) {
  sc->add_option("--calibrate", o.cal_target, "Scale mass, u_max and u_rate so LHI at the calibration point hits this");
  sc->add_option("--cal-phi", o.cal_phi, "Calibration phi [deg]");
  sc->add_option("--cal-theta", o.cal_theta, "Calibration theta [deg]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hoverability analysis for multi-rotor aerial vehicles"};
  app.set_version_flag("--version", std::string(MRAV_VERSION));
  app.require_subcommand(1);
  Options o;

  struct Sub {
    const char* name;
    const char* help;
    bool platform;
  };
  const Sub subs[] = {
      {"analyze", "Ranks, class, CSH, ODL and a hover witness", true},
      {"hover-solve", "Hover witness at one orientation", true},
      {"hover-map", "Hover feasibility over the orientation grid", true},
      {"odl", "Omnidirectional lift", true},
      {"force-set", "Zero-moment force set support samples", true},
      {"lhi", "Local hoverability index at a hover witness", true},
      {"lhi-map", "LHI over the orientation grid", true},
      {"moment-sets", "Moment set at hover and local moment-rate zonotope", true},
      {"simulate", "Closed-loop wrench tracking experiment", true},
      {"dump-allocation", "Allocation matrices", true},
      {"presets", "List built-in platforms", false},
  };
  std::map<std::string, CLI::App*> cmds;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    add_common(sc, o, s.platform);
    cmds[s.name] = sc;
  }
  for (const char* n : {"hover-solve", "lhi", "moment-sets", "simulate", "dump-allocation"}) add_orientation(cmds[n], o);
  for (const char* n : {"hover-map", "lhi-map"})
    cmds[n]->add_option("--step", o.step, "Grid step [deg]");
  for (const char* n : {"lhi", "lhi-map"}) add_calibration(cmds[n], o);
  cmds["dump-allocation"]->add_option("--matrix", o.matrix, "A, Ared, Ffixed or F (at the hover witness)");
  auto* sim = cmds["simulate"];
  sim->add_option("--experiment", o.experiment, "moment-step or force-track");
  sim->add_option("--axis", o.axis, "Moment step axis: x, y, z or a,b,c");
  sim->add_option("--magnitude", o.magnitude, "Moment step [N m]");
  sim->add_option("--angle", o.angle, "Force rotation about body x [deg]");
  sim->add_option("--duration", o.duration, "[s]");
  sim->add_option("--dt", o.dt, "[s]");
  sim->add_option("--gain", o.gain, "Wrench error gain [1/s]");
  sim->add_option("--every", o.every, "Keep every n-th sample");
  sim->add_flag("--summary", o.summary, "Summary only, no time series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  std::string sub;
  for (const auto& [name, sc] : cmds)
    if (sc->parsed()) sub = name;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Report r;
    if (sub == "presets") {
      r = cmd_presets();
    } else {
      const auto p = load(o);
      if (sub == "analyze") r = cmd_analyze(p, o);
      else if (sub == "hover-solve") r = cmd_hover_solve(p, o);
      else if (sub == "hover-map") r = cmd_hover_map(p, o);
      else if (sub == "odl") r = cmd_odl(p, o);
      else if (sub == "force-set") r = cmd_force_set(p, o);
      else if (sub == "lhi") r = cmd_lhi(p, o);
      else if (sub == "lhi-map") r = cmd_lhi_map(p, o);
      else if (sub == "moment-sets") r = cmd_moment_sets(p, o);
      else if (sub == "simulate") r = cmd_simulate(p, o);
      else if (sub == "dump-allocation") r = cmd_dump_allocation(p, o);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string text = render(r, manifest(sub, o, secs), o.format, sub);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (o.output.empty()) {
      std::cout << text;
    } else {
      const std::string path = resolve_output(o.output);
      std::ofstream out(path, std::ios::binary);
      if (!out) throw InputError("cannot write '" + path + "'");
      out << text;
    }
    return r.exit_code;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const YAML::Exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const SimulationDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
}
