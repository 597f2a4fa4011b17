#pragma once

#include "mrav/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mrav {

struct AngleRange {
  double lo = -kPi;
  double hi = kPi;

  bool full() const { return lo <= -kPi + 1e-12 && hi >= kPi - 1e-12; }
  double span() const { return hi - lo; }
  bool contains(double a, double margin = 0.0, double tol = 1e-12) const {
    if (full()) return true;
    return a >= lo + margin - tol && a <= hi - margin + tol;
  }
  bool operator==(const AngleRange&) const = default;
};

enum class TiltKind { Fixed, RadialOnly, Dual };

inline const char* to_string(TiltKind k) {
  switch (k) {
    case TiltKind::Fixed: return "fixed";
    case TiltKind::RadialOnly: return "radial";
    case TiltKind::Dual: return "dual";
  }
  return "?";
}

struct TiltCapability {
  TiltKind kind = TiltKind::Fixed;
  Vec3 direction = Vec3::UnitZ();  // body frame, Fixed only
  AngleRange alpha;                // RadialOnly and Dual
  AngleRange beta;                 // Dual

  static TiltCapability fixed(const Vec3& dir = Vec3::UnitZ()) {
    TiltCapability t;
    t.kind = TiltKind::Fixed;
    t.direction = dir.normalized();
    return t;
  }
  static TiltCapability radial(AngleRange alpha = {}) {
    TiltCapability t;
    t.kind = TiltKind::RadialOnly;
    t.alpha = alpha;
    return t;
  }
  static TiltCapability dual(AngleRange alpha = {}, AngleRange beta = {}) {
    TiltCapability t;
    t.kind = TiltKind::Dual;
    t.alpha = alpha;
    t.beta = beta;
    return t;
  }

  /// Number of actuated tilt angles (0, 1 or 2).
  int num_angles() const {
    switch (kind) {
      case TiltKind::Fixed: return 0;
      case TiltKind::RadialOnly: return 1;
      case TiltKind::Dual: return 2;
    }
    return 0;
  }
  /// Columns this propeller contributes to the reduced allocation matrix.
  int reduced_dim() const { return num_angles() + 1; }

  bool operator==(const TiltCapability& o) const {
    return kind == o.kind && (kind != TiltKind::Fixed || direction.isApprox(o.direction, 1e-12)) &&
           (kind == TiltKind::Fixed || alpha == o.alpha) && (kind != TiltKind::Dual || beta == o.beta);
  }
};

struct PropellerSpec {
  Vec3 position = Vec3::Zero();  // [m], body frame
  double gamma = 0.0;            // [rad], azimuth of position in the x_B-y_B plane
  double drag_ratio = 0.0;       // [m], signed by spin direction
  TiltCapability tilt;
  double u_max = 1.0;           // [N]
  double u_rate_max = 0.0;      // [N/s]
  double angle_rate_max = 0.0;  // [rad/s]
  bool functional = true;

  /// Maps a thrust vector to the moment it produces about the CoM.
  Mat3 moment_map() const { return skew(position) + drag_ratio * Mat3::Identity(); }

  bool operator==(const PropellerSpec& o) const {
    return (position - o.position).norm() < 1e-12 && std::abs(gamma - o.gamma) < 1e-12 &&
           drag_ratio == o.drag_ratio && tilt == o.tilt && u_max == o.u_max && u_rate_max == o.u_rate_max &&
           angle_rate_max == o.angle_rate_max && functional == o.functional;
  }
};

/// gamma convention: azimuth of the planar projection, 0 on the z_B axis.
inline double azimuth_of(const Vec3& p) {
  if (std::hypot(p.x(), p.y()) < 1e-12) return 0.0;
  return std::atan2(p.y(), p.x());
}

struct PlatformSpec {
  std::string name;
  std::vector<PropellerSpec> propellers;
  double mass = 1.0;  // [kg]
  Mat3 inertia = Mat3::Identity();
  double gravity = 9.81;

  double weight() const { return mass * gravity; }

  /// Indices of functional propellers, in platform order.
  std::vector<int> active() const {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(propellers.size()); ++i)
      if (propellers[i].functional) idx.push_back(i);
    return idx;
  }
  int num_active() const { return static_cast<int>(active().size()); }

  /// Thrust inputs plus active tilt angles.
  int dof() const {
    int n = 0;
    for (const auto& p : propellers)
      if (p.functional) n += 1 + p.tilt.num_angles();
    return n;
  }

  bool operator==(const PlatformSpec& o) const {
    return propellers == o.propellers && mass == o.mass && inertia.isApprox(o.inertia, 1e-14) &&
           gravity == o.gravity;
  }
};

/// Thrust direction of a propeller at azimuth gamma tilted by alpha (about
/// its radial axis) and beta (about the tangential axis).
inline Vec3 thrust_direction(double alpha, double beta, double gamma) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sb = std::sin(beta), cb = std::cos(beta);
  return rot_z(gamma) * Vec3(-sb, sa * cb, ca * cb);
}

inline Vec3 thrust_direction_dalpha(double alpha, double beta, double gamma) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double cb = std::cos(beta);
  return rot_z(gamma) * Vec3(0.0, ca * cb, -sa * cb);
}

inline Vec3 thrust_direction_dbeta(double alpha, double beta, double gamma) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sb = std::sin(beta), cb = std::cos(beta);
  return rot_z(gamma) * Vec3(-cb, -sa * sb, -ca * sb);
}

/// Thrust and tilt of one functional propeller. Angles a propeller cannot
/// actuate are carried as 0 and ignored.
struct PropellerCommand {
  double u = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool operator==(const PropellerCommand&) const = default;
};

/// The control input H = (u, O), one entry per functional propeller.
struct ControlInput {
  std::vector<PropellerCommand> props;

  std::size_t size() const { return props.size(); }

  /// Flattened as [u_1 .. u_N, then active angles propeller by propeller].
  VecX to_vector(const PlatformSpec& platform) const;
  static ControlInput from_vector(const PlatformSpec& platform, const VecX& h);
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 w;
    w << force, moment;
    return w;
  }
  static Wrench from(const Vec6& w) { return {w.head<3>(), w.tail<3>()}; }
};

inline Vec3 unit_direction(const PropellerSpec& p, const PropellerCommand& c) {
  switch (p.tilt.kind) {
    case TiltKind::Fixed: return p.tilt.direction;
    case TiltKind::RadialOnly: return thrust_direction(c.alpha, 0.0, p.gamma);
    case TiltKind::Dual: return thrust_direction(c.alpha, c.beta, p.gamma);
  }
  return Vec3::UnitZ();
}

inline void check_dimensions(const PlatformSpec& platform, const ControlInput& h) {
  const int n = platform.num_active();
  if (static_cast<int>(h.size()) != n)
    throw InputError("control input has " + std::to_string(h.size()) + " propeller entries, platform has " +
                     std::to_string(n) + " functional propellers");
}

inline VecX ControlInput::to_vector(const PlatformSpec& platform) const {
  check_dimensions(platform, *this);
  const auto idx = platform.active();
  VecX h(platform.dof());
  const int n = static_cast<int>(idx.size());
  int k = n;
  for (int j = 0; j < n; ++j) {
    const auto& spec = platform.propellers[idx[j]];
    h[j] = props[j].u;
    if (spec.tilt.num_angles() >= 1) h[k++] = props[j].alpha;
    if (spec.tilt.num_angles() == 2) h[k++] = props[j].beta;
  }
  return h;
}

inline ControlInput ControlInput::from_vector(const PlatformSpec& platform, const VecX& h) {
  if (h.size() != platform.dof())
    throw InputError("control vector has " + std::to_string(h.size()) + " entries, platform DoF is " +
                     std::to_string(platform.dof()));
  const auto idx = platform.active();
  const int n = static_cast<int>(idx.size());
  ControlInput out;
  out.props.resize(n);
  int k = n;
  for (int j = 0; j < n; ++j) {
    const auto& spec = platform.propellers[idx[j]];
    out.props[j].u = h[j];
    if (spec.tilt.num_angles() >= 1) out.props[j].alpha = h[k++];
    if (spec.tilt.num_angles() == 2) out.props[j].beta = h[k++];
  }
  return out;
}

/// Checks 0 <= u <= u_max and angle limits. Returns an empty string when
/// valid, otherwise the first violation.
inline std::string control_violation(const PlatformSpec& platform, const ControlInput& h, double tol = 1e-9) {
  if (static_cast<int>(h.size()) != platform.num_active()) return "dimension mismatch";
  const auto idx = platform.active();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& spec = platform.propellers[idx[j]];
    const auto& c = h.props[j];
    if (!(c.u >= -tol && c.u <= spec.u_max + tol))
      return "propeller " + std::to_string(idx[j]) + " thrust out of [0, u_max]";
    if (spec.tilt.num_angles() >= 1 && !spec.tilt.alpha.contains(c.alpha, 0.0, tol))
      return "propeller " + std::to_string(idx[j]) + " alpha out of range";
    if (spec.tilt.num_angles() == 2 && !spec.tilt.beta.contains(c.beta, 0.0, tol))
      return "propeller " + std::to_string(idx[j]) + " beta out of range";
  }
  return {};
}

/// Per-propeller thrust vectors v_i, functional propellers only.
inline std::vector<Vec3> control_to_vectors(const PlatformSpec& platform, const ControlInput& h) {
  check_dimensions(platform, h);
  const auto idx = platform.active();
  std::vector<Vec3> v;
  v.reserve(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j)
    v.push_back(h.props[j].u * unit_direction(platform.propellers[idx[j]], h.props[j]));
  return v;
}

inline Wrench wrench_of(const PlatformSpec& platform, const ControlInput& h) {
  const auto v = control_to_vectors(platform, h);
  const auto idx = platform.active();
  Wrench w;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    w.force += v[j];
    w.moment += platform.propellers[idx[j]].moment_map() * v[j];
  }
  return w;
}

inline ControlInput zero_control(const PlatformSpec& platform) {
  ControlInput h;
  h.props.resize(platform.num_active());
  return h;
}

}  // namespace mrav
