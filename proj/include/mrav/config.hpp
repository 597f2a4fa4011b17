#pragma once

// Platform config ingestion. Documents are YAML:
//
//   name: my-platform
//   mass: 1.0            # kg
//   gravity: 9.81        # optional
//   inertia: [[0.01, 0, 0], [0, 0.01, 0], [0, 0, 0.02]]   # or 9 numbers, row-major
//   propellers:
//     - position: [0.2, 0, 0]
//       drag_ratio: 0.012
//       tilt: dual          # fixed | radial | dual
//       direction: [0, 0, 1]               # fixed only, default e3
//       alpha_range: [-30deg, 30deg]       # default: full circle
//       beta_range: [-0.5, 0.5]            # bare numbers are radians
//       u_max: 9.81
//       u_rate_max: 200
//       angle_rate_max: 4.1
//       functional: false                  # optional failure flag
//       gamma: 0                           # optional, checked against position

#include "mrav/platform.hpp"

#include <yaml-cpp/yaml.h>

#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace mrav {

namespace detail {

[[noreturn]] inline void config_fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  const auto mark = node.Mark();
  std::ostringstream os;
  os << "config error";
  if (mark.line >= 0) os << " at line " << mark.line + 1;
  os << " (field '" << field << "'): " << what;
  throw InputError(os.str());
}

inline double parse_number(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) config_fail(node, field, "expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    config_fail(node, field, "expected a number, got '" + node.Scalar() + "'");
  }
}

/// Number in radians, or a string with an explicit `deg` / `rad` suffix.
inline double parse_angle(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) config_fail(node, field, "expected an angle");
  std::string s = node.Scalar();
  double scale = 1.0;
  auto strip = [&](const std::string& suffix, double k) {
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s = s.substr(0, s.size() - suffix.size());
      scale = k;
      return true;
    }
    return false;
  };
  if (!strip("deg", kPi / 180.0)) strip("rad", 1.0);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v * scale;
  } catch (const std::exception&) {
    config_fail(node, field, "cannot parse angle '" + node.Scalar() + "'");
  }
}

inline Vec3 parse_vec3(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() != 3) config_fail(node, field, "expected a list of 3 numbers");
  return {parse_number(node[0], field), parse_number(node[1], field), parse_number(node[2], field)};
}

inline AngleRange parse_range(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() != 2) config_fail(node, field, "expected [lo, hi]");
  AngleRange r{parse_angle(node[0], field), parse_angle(node[1], field)};
  if (!(r.lo <= r.hi)) config_fail(node, field, "lo must not exceed hi");
  if (r.lo < -kPi - 1e-9 || r.hi > kPi + 1e-9) config_fail(node, field, "range must lie within [-pi, pi]");
  r.lo = std::max(r.lo, -kPi);
  r.hi = std::min(r.hi, kPi);
  return r;
}

inline Mat3 parse_inertia(const YAML::Node& node) {
  Mat3 j;
  if (node.IsSequence() && node.size() == 9) {
    for (int k = 0; k < 9; ++k) j(k / 3, k % 3) = parse_number(node[k], "inertia");
  } else if (node.IsSequence() && node.size() == 3) {
    for (int r = 0; r < 3; ++r) {
      if (!node[r].IsSequence() || node[r].size() != 3) config_fail(node[r], "inertia", "expected 3 rows of 3");
      for (int c = 0; c < 3; ++c) j(r, c) = parse_number(node[r][c], "inertia");
    }
  } else {
    config_fail(node, "inertia", "expected a 3x3 matrix (nested or 9 numbers, row-major)");
  }
  return j;
}

}  // namespace detail

/// Checks every platform invariant; throws InvariantError naming the first
/// that fails.
inline void validate_platform(const PlatformSpec& p) {
  if (!(p.mass > 0.0) || !std::isfinite(p.mass)) throw InvariantError("mass_positive", "mass must be > 0");
  if (!(p.gravity > 0.0) || !std::isfinite(p.gravity)) throw InvariantError("gravity_positive", "gravity must be > 0");
  if ((p.inertia - p.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvariantError("inertia_symmetric", "inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(p.inertia);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw InvariantError("inertia_positive_definite", "inertia must be positive-definite");
  if (p.num_active() < 1) throw InvariantError("functional_propellers", "at least one functional propeller required");
  for (std::size_t i = 0; i < p.propellers.size(); ++i) {
    const auto& q = p.propellers[i];
    const std::string at = " (propeller " + std::to_string(i) + ")";
    if (!(q.u_max > 0.0)) throw InvariantError("u_max_positive", "u_max must be > 0" + at);
    if (!(q.u_rate_max >= 0.0)) throw InvariantError("u_rate_nonnegative", "u_rate_max must be >= 0" + at);
    if (!(q.angle_rate_max >= 0.0))
      throw InvariantError("angle_rate_nonnegative", "angle_rate_max must be >= 0" + at);
    if (!q.position.allFinite() || !std::isfinite(q.drag_ratio))
      throw InvariantError("finite_geometry", "position and drag_ratio must be finite" + at);
    if (std::abs(std::remainder(q.gamma - azimuth_of(q.position), 2.0 * kPi)) > 1e-9)
      throw InvariantError("gamma_consistent", "gamma does not match atan2(p.y, p.x)" + at);
    if (q.tilt.kind == TiltKind::Fixed && std::abs(q.tilt.direction.norm() - 1.0) > 1e-10)
      throw InvariantError("unit_direction", "fixed direction must be a unit vector" + at);
  }
}

inline PlatformSpec platform_from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) detail::config_fail(root, "<root>", "expected a mapping");
  PlatformSpec p;
  if (root["name"]) p.name = root["name"].as<std::string>();
  if (!root["mass"]) detail::config_fail(root, "mass", "missing required field");
  p.mass = detail::parse_number(root["mass"], "mass");
  if (root["gravity"]) p.gravity = detail::parse_number(root["gravity"], "gravity");
  if (!root["inertia"]) detail::config_fail(root, "inertia", "missing required field");
  p.inertia = detail::parse_inertia(root["inertia"]);
  const auto props = root["propellers"];
  if (!props || !props.IsSequence() || props.size() == 0)
    detail::config_fail(root, "propellers", "expected a non-empty list");
  for (const auto& n : props) {
    PropellerSpec q;
    if (!n["position"]) detail::config_fail(n, "position", "missing required field");
    q.position = detail::parse_vec3(n["position"], "position");
    q.gamma = azimuth_of(q.position);
    if (n["gamma"]) {
      const double g = detail::parse_angle(n["gamma"], "gamma");
      if (std::abs(std::remainder(g - q.gamma, 2.0 * kPi)) > 1e-6)
        detail::config_fail(n["gamma"], "gamma", "does not match atan2(position.y, position.x)");
    }
    q.drag_ratio = n["drag_ratio"] ? detail::parse_number(n["drag_ratio"], "drag_ratio") : 0.0;
    const std::string tilt = n["tilt"] ? n["tilt"].as<std::string>() : "fixed";
    if (tilt == "fixed") {
      q.tilt = TiltCapability::fixed(n["direction"] ? detail::parse_vec3(n["direction"], "direction")
                                                    : Vec3::UnitZ());
      if (n["direction"] && detail::parse_vec3(n["direction"], "direction").norm() < 1e-12)
        detail::config_fail(n["direction"], "direction", "must be nonzero");
    } else if (tilt == "radial") {
      q.tilt = TiltCapability::radial(n["alpha_range"] ? detail::parse_range(n["alpha_range"], "alpha_range")
                                                       : AngleRange{});
    } else if (tilt == "dual") {
      q.tilt = TiltCapability::dual(
          n["alpha_range"] ? detail::parse_range(n["alpha_range"], "alpha_range") : AngleRange{},
          n["beta_range"] ? detail::parse_range(n["beta_range"], "beta_range") : AngleRange{});
    } else {
      detail::config_fail(n["tilt"], "tilt", "expected fixed | radial | dual, got '" + tilt + "'");
    }
    if (!n["u_max"]) detail::config_fail(n, "u_max", "missing required field");
    q.u_max = detail::parse_number(n["u_max"], "u_max");
    q.u_rate_max = n["u_rate_max"] ? detail::parse_number(n["u_rate_max"], "u_rate_max") : 0.0;
    q.angle_rate_max = n["angle_rate_max"] ? detail::parse_number(n["angle_rate_max"], "angle_rate_max") : 0.0;
    q.functional = n["functional"] ? n["functional"].as<bool>() : true;
    p.propellers.push_back(q);
  }
  validate_platform(p);
  return p;
}

/// Parses and validates one platform document.
inline PlatformSpec load_platform(const std::string& config_text) {
  YAML::Node root;
  try {
    root = YAML::Load(config_text);
  } catch (const YAML::ParserException& e) {
    throw InputError("config parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  try {
    return platform_from_yaml(root);
  } catch (const YAML::Exception& e) {
    throw InputError("config error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

/// YAML text that load_platform reads back to an equal PlatformSpec.
inline std::string serialize_platform(const PlatformSpec& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto vec = [&](const Vec3& v) { os << "[" << v.x() << ", " << v.y() << ", " << v.z() << "]"; };
  if (!p.name.empty()) os << "name: " << p.name << "\n";
  os << "mass: " << p.mass << "\n";
  os << "gravity: " << p.gravity << "\n";
  os << "inertia: [";
  for (int k = 0; k < 9; ++k) os << (k ? ", " : "") << p.inertia(k / 3, k % 3);
  os << "]\n";
  os << "propellers:\n";
  for (const auto& q : p.propellers) {
    os << "  - position: ";
    vec(q.position);
    os << "\n    drag_ratio: " << q.drag_ratio << "\n";
    os << "    tilt: " << to_string(q.tilt.kind) << "\n";
    if (q.tilt.kind == TiltKind::Fixed) {
      os << "    direction: ";
      vec(q.tilt.direction);
      os << "\n";
    }
    if (q.tilt.kind != TiltKind::Fixed)
      os << "    alpha_range: [" << q.tilt.alpha.lo << ", " << q.tilt.alpha.hi << "]\n";
    if (q.tilt.kind == TiltKind::Dual)
      os << "    beta_range: [" << q.tilt.beta.lo << ", " << q.tilt.beta.hi << "]\n";
    os << "    u_max: " << q.u_max << "\n";
    os << "    u_rate_max: " << q.u_rate_max << "\n";
    os << "    angle_rate_max: " << q.angle_rate_max << "\n";
    if (!q.functional) os << "    functional: false\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Built-in presets.

inline constexpr double kCaseArm = 0.2;     // [m]
inline constexpr double kCaseDrag = 0.012;  // [m]

inline PropellerSpec make_propeller(const Vec3& pos, double drag, TiltCapability tilt, double u_max = 9.81,
                                    double u_rate = 200.0, double angle_rate = 4.1) {
  PropellerSpec q;
  q.position = pos;
  q.gamma = azimuth_of(pos);
  q.drag_ratio = drag;
  q.tilt = tilt;
  q.u_max = u_max;
  q.u_rate_max = u_rate;
  q.angle_rate_max = angle_rate;
  return q;
}

inline PlatformSpec base_platform(std::string name) {
  PlatformSpec p;
  p.name = std::move(name);
  p.mass = 1.0;
  p.inertia = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  p.gravity = 9.81;
  return p;
}

/// Equally spaced coplanar trirotor arms with r1 = -r2 = r3.
inline std::array<Vec3, 3> trirotor_positions(double l = kCaseArm) {
  const double s = std::sqrt(3.0) / 2.0;
  return {Vec3(l, 0, 0), Vec3(-l / 2, l * s, 0), Vec3(-l / 2, -l * s, 0)};
}

inline PlatformSpec preset_quadrotor() {
  auto p = base_platform("quadrotor");
  const double l = kCaseArm, r = kCaseDrag;
  const std::array<Vec3, 4> pos = {Vec3(l, 0, 0), Vec3(0, l, 0), Vec3(-l, 0, 0), Vec3(0, -l, 0)};
  for (int i = 0; i < 4; ++i)
    p.propellers.push_back(make_propeller(pos[i], i % 2 == 0 ? r : -r, TiltCapability::fixed()));
  return p;
}

/// Two rotors mounted above the CoM, each tilting about its arm.
inline PlatformSpec preset_birotor() {
  auto p = base_platform("birotor-dualtilt");
  const double l = kCaseArm, h = 0.05, r = kCaseDrag;
  p.propellers.push_back(make_propeller(Vec3(l, 0, h), r, TiltCapability::radial()));
  p.propellers.push_back(make_propeller(Vec3(-l, 0, h), -r, TiltCapability::radial()));
  return p;
}

/// T-shaped trirotor: two fixed front rotors and a tail rotor tilting about
/// its arm.
inline PlatformSpec preset_trirotor_tail() {
  auto p = base_platform("trirotor-tail");
  const double r = kCaseDrag;
  p.propellers.push_back(make_propeller(Vec3(0.1, 0.15, 0), r, TiltCapability::fixed()));
  p.propellers.push_back(make_propeller(Vec3(0.1, -0.15, 0), -r, TiltCapability::fixed()));
  p.propellers.push_back(make_propeller(Vec3(-0.2, 0, 0), r, TiltCapability::radial()));
  return p;
}

inline PlatformSpec preset_trirotor_radial() {
  auto p = base_platform("trirotor-radial");
  const auto pos = trirotor_positions();
  const double r[3] = {kCaseDrag, -kCaseDrag, kCaseDrag};
  for (int i = 0; i < 3; ++i) p.propellers.push_back(make_propeller(pos[i], r[i], TiltCapability::radial()));
  return p;
}

inline PlatformSpec preset_dualtilt_trirotor() {
  auto p = base_platform("dualtilt-trirotor");
  const auto pos = trirotor_positions();
  const double r[3] = {kCaseDrag, -kCaseDrag, kCaseDrag};
  for (int i = 0; i < 3; ++i) p.propellers.push_back(make_propeller(pos[i], r[i], TiltCapability::dual()));
  return p;
}

inline PlatformSpec preset_dualtilt_trirotor_failed3() {
  auto p = preset_dualtilt_trirotor();
  p.name = "dualtilt-trirotor-failed3";
  p.propellers[2].functional = false;
  return p;
}

inline std::vector<std::string> preset_names() {
  return {"quadrotor", "birotor-dualtilt", "trirotor-tail", "trirotor-radial", "dualtilt-trirotor",
          "dualtilt-trirotor-failed3"};
}

inline PlatformSpec preset(const std::string& name) {
  if (name == "quadrotor") return preset_quadrotor();
  if (name == "birotor-dualtilt") return preset_birotor();
  if (name == "trirotor-tail") return preset_trirotor_tail();
  if (name == "trirotor-radial") return preset_trirotor_radial();
  if (name == "dualtilt-trirotor") return preset_dualtilt_trirotor();
  if (name == "dualtilt-trirotor-failed3") return preset_dualtilt_trirotor_failed3();
  throw InputError("unknown preset '" + name + "'");
}

/// Uniform overrides applied to every propeller.
inline void set_u_max(PlatformSpec& p, double u_max) {
  for (auto& q : p.propellers) q.u_max = u_max;
}
inline void set_u_rate(PlatformSpec& p, double rate) {
  for (auto& q : p.propellers) q.u_rate_max = rate;
}
inline void set_angle_rate(PlatformSpec& p, double rate) {
  for (auto& q : p.propellers) q.angle_rate_max = rate;
}

}  // namespace mrav
