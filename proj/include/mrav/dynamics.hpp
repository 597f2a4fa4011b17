#pragma once

#include "mrav/local_hover.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mrav {

struct RigidBodyState {
  Vec3 position = Vec3::Zero();         // world [m]
  Vec3 velocity = Vec3::Zero();         // world [m/s]
  Mat3 orientation = Mat3::Identity();  // body to world
  Vec3 angular_velocity = Vec3::Zero(); // body [rad/s]
  ControlInput actuators;
  double t = 0.0;
};

namespace detail {

/// Inverse right Jacobian of SO(3): maps body rates to d(theta)/dt for R0 exp(theta).
inline Vec3 dexpinv(const Vec3& th, const Vec3& w) {
  const double a = th.norm();
  const Vec3 c1 = th.cross(w);
  const Vec3 c2 = th.cross(c1);
  double k;
  if (a < 1e-4) {
    k = 1.0 / 12.0 + a * a / 720.0;
  } else {
    k = (1.0 - 0.5 * a * std::sin(a) / (1.0 - std::cos(a))) / (a * a);
  }
  return w + 0.5 * c1 + k * c2;
}

struct Deriv {
  Vec3 dp, dv, dth, dw;
};

inline bool finite(const RigidBodyState& s) {
  return s.position.allFinite() && s.velocity.allFinite() && s.orientation.allFinite() &&
         s.angular_velocity.allFinite();
}

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a >= kPi ? a - 2.0 * kPi : a;
}

}  // namespace detail

/// Actuator update: H <- clamp(H + sat(hdot) dt). Full-circle angles are wrapped.
inline ControlInput advance_actuators(const PlatformSpec& platform, const ControlInput& h, const VecX& hdot,
                                      double dt) {
  const auto box = RateBox::of(platform);
  if (hdot.size() != box.bounds.size()) throw InputError("actuator rate vector has the wrong length");
  const VecX next = h.to_vector(platform) + box.saturate(hdot) * dt;
  ControlInput out = ControlInput::from_vector(platform, next);
  const auto idx = platform.active();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& p = platform.propellers[idx[j]];
    auto& c = out.props[j];
    c.u = std::clamp(c.u, 0.0, p.u_max);
    auto fit = [](const AngleRange& r, double a) { return r.full() ? detail::wrap_angle(a) : std::clamp(a, r.lo, r.hi); };
    if (p.tilt.num_angles() >= 1) c.alpha = fit(p.tilt.alpha, c.alpha);
    if (p.tilt.num_angles() == 2) c.beta = fit(p.tilt.beta, c.beta);
  }
  return out;
}

/// Newton-Euler step with the body wrench held at wrench_of(H(t)) over
/// [t, t + dt]. RK4 in the Lie algebra around the current attitude.
inline RigidBodyState step(const PlatformSpec& platform, const RigidBodyState& s, const VecX& hdot, double dt) {
  if (!(dt > 0)) throw InputError("dt must be positive");
  if (!hdot.allFinite()) throw InputError("actuator rates must be finite");
  const Wrench w = wrench_of(platform, s.actuators);
  const double m = platform.mass;
  const Mat3& j = platform.inertia;
  const Mat3 r0 = s.orientation;
  const Vec3 g(0, 0, -platform.gravity);

  auto f = [&](const Vec3& v, const Vec3& th, const Vec3& om) {
    const Mat3 r = r0 * exp_so3(th);
    detail::Deriv d;
    d.dp = v;
    d.dv = g + r * w.force / m;
    d.dth = detail::dexpinv(th, om);
    d.dw = j.ldlt().solve(w.moment - om.cross(j * om));
    return d;
  };
  const Vec3 p = s.position, v = s.velocity, om = s.angular_velocity, z = Vec3::Zero();
  const auto k1 = f(v, z, om);
  const auto k2 = f(v + 0.5 * dt * k1.dv, 0.5 * dt * k1.dth, om + 0.5 * dt * k1.dw);
  const auto k3 = f(v + 0.5 * dt * k2.dv, 0.5 * dt * k2.dth, om + 0.5 * dt * k2.dw);
  const auto k4 = f(v + dt * k3.dv, dt * k3.dth, om + dt * k3.dw);
  auto comb = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return Vec3(dt / 6.0 * (a + 2.0 * b + 2.0 * c + d));
  };

  RigidBodyState out;
  out.position = p + comb(k1.dp, k2.dp, k3.dp, k4.dp);
  out.velocity = v + comb(k1.dv, k2.dv, k3.dv, k4.dv);
  out.orientation = orthonormalize(r0 * exp_so3(comb(k1.dth, k2.dth, k3.dth, k4.dth)));
  out.angular_velocity = om + comb(k1.dw, k2.dw, k3.dw, k4.dw);
  out.actuators = advance_actuators(platform, s.actuators, hdot, dt);
  out.t = s.t + dt;
  if (!detail::finite(out)) throw SimulationDiverged("non-finite state at t = " + std::to_string(out.t));
  return out;
}

struct ControllerGains {
  double k = 50.0;         // wrench error gain [1/s]
  double lambda = 1e-3;    // damping of the pseudo-inverse
};

/// Hdot = F^T (F F^T + lambda^2 I)^-1 K (w_d - w(H)), clipped to the rate box.
inline VecX wrench_rate_controller(const PlatformSpec& platform, const RigidBodyState& s, const Wrench& desired,
                                   const ControllerGains& gains = {}) {
  const auto f = full_jacobian(platform, s.actuators);
  const Vec6 err = desired.stacked() - wrench_of(platform, s.actuators).stacked();
  const VecX hdot = damped_pseudo_inverse(f.m, gains.lambda) * (gains.k * err);
  return RateBox::of(platform).saturate(hdot);
}

struct Sample {
  double t = 0.0;
  Vec3 position, velocity, angular_velocity;
  Mat3 orientation;
  Vec6 commanded, applied;
  VecX h, hdot;
};

struct ExperimentResult {
  std::vector<Sample> samples;
  double dt = 0.0;
  double rise_time = std::numeric_limits<double>::infinity();   // 90 % of the step [s]
  double early_moment_integral = 0.0;  // integral of the moment along the step axis over the first 50 ms [N m s]
  double settle_time = std::numeric_limits<double>::infinity(); // force direction error <= 0.5 deg for good [s]
  double final_error = 0.0;            // moment [N m] or angle [rad], depending on the experiment
};

inline HoverSolution require_hover(const PlatformSpec& platform, const Mat3& r_h, const HoverOptions& opt) {
  auto sol = solve_hover(platform, r_h, opt);
  if (!sol.feasible()) throw InvariantError("hover", "no hover solution at the requested orientation");
  return sol;
}

/// Runs the controller against a fixed desired body wrench from hover at r_h.
inline ExperimentResult run_wrench_tracking(const PlatformSpec& platform, const HoverSolution& hover,
                                            const Wrench& desired, double duration, double dt,
                                            const ControllerGains& gains) {
  if (!(dt > 0) || !(duration >= 0)) throw InputError("need dt > 0 and duration >= 0");
  ExperimentResult res;
  res.dt = dt;
  RigidBodyState s;
  s.orientation = hover.orientation;
  s.actuators = hover.control;
  const long n = std::lround(duration / dt);
  res.samples.reserve(static_cast<std::size_t>(n + 1));
  for (long i = 0; i <= n; ++i) {
    const VecX hdot = i < n ? wrench_rate_controller(platform, s, desired, gains) : VecX::Zero(RateBox::of(platform).bounds.size());
    Sample smp;
    smp.t = i * dt;
    smp.position = s.position;
    smp.velocity = s.velocity;
    smp.angular_velocity = s.angular_velocity;
    smp.orientation = s.orientation;
    smp.commanded = desired.stacked();
    smp.applied = wrench_of(platform, s.actuators).stacked();
    smp.h = s.actuators.to_vector(platform);
    smp.hdot = hdot;
    res.samples.push_back(std::move(smp));
    if (i < n) {
      s = step(platform, s, hdot, dt);
      s.t = (i + 1) * dt;
    }
  }
  return res;
}

inline ExperimentResult moment_step_experiment(const PlatformSpec& platform, const Mat3& r_h, const Vec3& axis,
                                               double magnitude, double duration, double dt,
                                               const ControllerGains& gains = {}, const HoverOptions& opt = {}) {
  if (axis.norm() < 1e-12) throw InputError("moment axis must be nonzero");
  const Vec3 a = axis.normalized();
  const auto hover = require_hover(platform, r_h, opt);
  const Wrench w0 = wrench_of(platform, hover.control);
  const Wrench desired{w0.force, w0.moment + magnitude * a};
  auto res = run_wrench_tracking(platform, hover, desired, duration, dt, gains);
  for (std::size_t i = 0; i < res.samples.size(); ++i) {
    const auto& smp = res.samples[i];
    const double m = a.dot(smp.applied.tail<3>());
    if (magnitude != 0.0 && !std::isfinite(res.rise_time) && m / magnitude >= 0.9) res.rise_time = smp.t;
    if (i + 1 < res.samples.size() && smp.t < 0.05 - 1e-12) {
      const double m1 = a.dot(res.samples[i + 1].applied.tail<3>());
      res.early_moment_integral += 0.5 * (m + m1) * dt;
    }
  }
  if (!res.samples.empty()) res.final_error = (res.samples.back().applied.tail<3>() - desired.moment).norm();
  return res;
}

/// Angle between the applied force and the commanded direction [rad].
inline double force_direction_error(const Vec6& applied, const Vec3& target) {
  const Vec3 f = applied.head<3>();
  if (f.norm() < 1e-12) return kPi;
  return std::acos(std::clamp(f.normalized().dot(target.normalized()), -1.0, 1.0));
}

/// Commands the hover force rotated by `angle` about body x (same magnitude,
/// zero moment) and records the direction error.
inline ExperimentResult force_orientation_experiment(const PlatformSpec& platform, const Mat3& r_h, double angle,
                                                     double duration, double dt, const ControllerGains& gains = {},
                                                     const HoverOptions& opt = {}) {
  const auto hover = require_hover(platform, r_h, opt);
  const Wrench w0 = wrench_of(platform, hover.control);
  const Vec3 target = rot_x(angle) * w0.force;
  auto res = run_wrench_tracking(platform, hover, Wrench{target, Vec3::Zero()}, duration, dt, gains);
  const double tol = deg2rad(0.5);
  for (std::size_t i = res.samples.size(); i-- > 0;) {
    if (force_direction_error(res.samples[i].applied, target) > tol) {
      if (i + 1 < res.samples.size()) res.settle_time = res.samples[i + 1].t;
      break;
    }
    if (i == 0) res.settle_time = 0.0;
  }
  if (!res.samples.empty()) res.final_error = force_direction_error(res.samples.back().applied, target);
  return res;
}

}  // namespace mrav
