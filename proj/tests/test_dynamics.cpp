#include "support.hpp"

#include <gtest/gtest.h>

using namespace mrav;

namespace {
VecX zero_rates(const PlatformSpec& p) { return VecX::Zero(p.dof()); }

RigidBodyState at_hover(const PlatformSpec& p, const Mat3& r = Mat3::Identity()) {
  const auto sol = solve_hover(p, r);
  RigidBodyState s;
  s.orientation = r;
  s.actuators = sol.control;
  return s;
}

double kinetic_energy(const PlatformSpec& p, const RigidBodyState& s) {
  return 0.5 * p.mass * s.velocity.squaredNorm() + 0.5 * s.angular_velocity.dot(p.inertia * s.angular_velocity);
}
}  // namespace

TEST(Step, FreeFall) {
  const auto p = preset("quadrotor");
  RigidBodyState s;
  s.actuators = zero_control(p);
  for (int i = 0; i < 100; ++i) s = step(p, s, zero_rates(p), 1e-3);
  EXPECT_NEAR(s.velocity.z(), -p.gravity * 0.1, 1e-12);
  EXPECT_NEAR(s.position.z(), -0.5 * p.gravity * 0.01, 1e-12);
}

TEST(Step, HoverEquilibrium) {
  for (const auto& n : preset_names()) {
    const auto p = preset(n);
    const auto cap = can_statically_hover(p);
    RigidBodyState s = at_hover(p, cap.witness->orientation);
    s.actuators = cap.witness->control;
    for (int i = 0; i < 1000; ++i) {
      const auto next = step(p, s, zero_rates(p), 1e-3);
      EXPECT_LE(((next.velocity - s.velocity) / 1e-3).norm(), 1e-6);
      s = next;
    }
    EXPECT_LE(s.position.norm(), 1e-4) << n;
    EXPECT_LE(Eigen::AngleAxisd(cap.witness->orientation.transpose() * s.orientation).angle(), 1e-5) << n;
  }
}

TEST(Step, EulerEquationForPureYaw) {
  // dual-tilt trirotor, equal thrusts, one propeller tilted: check wdot_z = m_z / J_zz at rest
  const auto p = preset("quadrotor");
  auto h = zero_control(p);
  for (auto& c : h.props) c.u = 2.0;
  h.props[0].u = 2.5;
  h.props[2].u = 2.5;
  RigidBodyState s;
  s.actuators = h;
  const Wrench w = wrench_of(p, h);
  const double dt = 1e-5;
  const auto next = step(p, s, zero_rates(p), dt);
  EXPECT_NEAR(next.angular_velocity.z() / dt, w.moment.z() / p.inertia(2, 2), 1e-6);
}

TEST(Step, TorqueFreeEnergyAndOrthonormality) {
  auto p = preset("quadrotor");
  p.gravity = 1e-300;  // effectively zero; validate_platform requires > 0
  p.inertia = Vec3(0.01, 0.015, 0.02).asDiagonal();
  RigidBodyState s;
  s.actuators = zero_control(p);
  s.angular_velocity = Vec3(3.0, 0.2, -1.0);
  s.velocity = Vec3(0.5, -0.2, 0.1);
  const double e0 = kinetic_energy(p, s);
  const Vec3 l0 = s.orientation * p.inertia * s.angular_velocity;
  for (int i = 0; i < 10000; ++i) s = step(p, s, zero_rates(p), 1e-3);
  EXPECT_LE(std::abs(kinetic_energy(p, s) - e0) / e0, 1e-6);
  EXPECT_LE((s.orientation * p.inertia * s.angular_velocity - l0).norm() / l0.norm(), 1e-6);
  EXPECT_LE((s.orientation.transpose() * s.orientation - Mat3::Identity()).norm(), 1e-8);
}

TEST(Step, FourthOrderConvergence) {
  auto p = preset("quadrotor");
  p.inertia = Vec3(0.01, 0.015, 0.02).asDiagonal();
  auto run = [&](double dt) {
    RigidBodyState s;
    s.actuators = zero_control(p);
    s.angular_velocity = Vec3(4.0, 0.5, -2.0);
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) s = step(p, s, zero_rates(p), dt);
    return s.orientation;
  };
  const Mat3 ref = run(1.25e-4);
  const double e1 = (run(4e-3) - ref).norm(), e2 = (run(2e-3) - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);  // ~16 for fourth order
}

TEST(Step, RejectsBadInputs) {
  const auto p = preset("quadrotor");
  RigidBodyState s;
  s.actuators = zero_control(p);
  EXPECT_THROW(step(p, s, zero_rates(p), 0.0), InputError);
  VecX bad = zero_rates(p);
  bad[0] = std::nan("");
  EXPECT_THROW(step(p, s, bad, 1e-3), InputError);
  s.velocity.x() = std::numeric_limits<double>::infinity();
  EXPECT_THROW(step(p, s, zero_rates(p), 1e-3), SimulationDiverged);
}

TEST(Actuators, RateAndRangeClamping) {
  auto p = preset("dualtilt-trirotor");
  for (auto& q : p.propellers) q.tilt = TiltCapability::dual({-0.5, 0.5}, {-0.5, 0.5});
  auto h = zero_control(p);
  const VecX hdot = VecX::Constant(p.dof(), 1e6);
  const auto next = advance_actuators(p, h, hdot, 0.01);
  for (const auto& c : next.props) {
    EXPECT_NEAR(c.u, 2.0, 1e-12);       // 200 N/s for 10 ms
    EXPECT_NEAR(c.alpha, 0.041, 1e-12);  // 4.1 rad/s
  }
  auto far = advance_actuators(p, h, hdot, 10.0);
  for (const auto& c : far.props) {
    EXPECT_EQ(c.u, p.propellers[0].u_max);
    EXPECT_EQ(c.alpha, 0.5);
  }
}

TEST(Actuators, FullCircleAnglesWrap) {
  const auto p = preset("dualtilt-trirotor");
  auto h = zero_control(p);
  h.props[0].alpha = 3.1;
  VecX hdot = zero_rates(p);
  hdot[3] = 4.0;  // alpha of propeller 0
  const auto next = advance_actuators(p, h, hdot, 0.02);
  EXPECT_NEAR(next.props[0].alpha, 3.18 - 2 * kPi, 1e-12);
}

TEST(Controller, ZeroErrorGivesZeroRates) {
  const auto p = preset("dualtilt-trirotor");
  const auto s = at_hover(p);
  EXPECT_LT(wrench_rate_controller(p, s, wrench_of(p, s.actuators)).norm(), 1e-9);
}

TEST(Controller, QuadrotorMomentStepUsesThrustsOnly) {
  const auto p = preset("quadrotor");
  const auto s = at_hover(p);
  Wrench w = wrench_of(p, s.actuators);
  w.moment.x() += 0.1;
  const VecX hdot = wrench_rate_controller(p, s, w);
  EXPECT_EQ(hdot.size(), 4);
  EXPECT_GT(hdot.norm(), 0.0);
  EXPECT_LE((hdot.cwiseAbs() - RateBox::of(p).bounds).maxCoeff(), 0.0);
}

TEST(Experiments, LogsAreConsistent) {
  const auto p = preset("dualtilt-trirotor");
  const auto res = moment_step_experiment(p, orientation_from_phi_theta(deg2rad(90), 0), Vec3::UnitX(), 1.5, 0.3, 1e-3);
  const auto box = RateBox::of(p);
  for (std::size_t i = 0; i < res.samples.size(); ++i) {
    const auto& s = res.samples[i];
    EXPECT_NEAR(s.t, i * 1e-3, 1e-12);
    const auto h = ControlInput::from_vector(p, s.h);
    EXPECT_LT((wrench_of(p, h).stacked() - s.applied).norm(), 1e-12);
    if (i + 1 < res.samples.size()) {
      VecX dh = (res.samples[i + 1].h - s.h) / 1e-3;
      EXPECT_LE((dh.cwiseAbs() - box.bounds).maxCoeff(), 1e-9);
    }
  }
}

TEST(Experiments, ZeroMagnitudeIsFlat) {
  const auto p = preset("dualtilt-trirotor");
  const auto res = moment_step_experiment(p, Mat3::Identity(), Vec3::UnitY(), 0.0, 0.2, 1e-3);
  for (const auto& s : res.samples) EXPECT_LT(s.applied.tail<3>().norm(), 1e-9);
  EXPECT_NEAR(res.early_moment_integral, 0.0, 1e-12);
}

TEST(Experiments, ZeroRotationSettlesImmediately) {
  const auto p = preset("dualtilt-trirotor");
  const auto res = force_orientation_experiment(p, Mat3::Identity(), 0.0, 0.1, 1e-3);
  EXPECT_EQ(res.settle_time, 0.0);
  EXPECT_LT(force_direction_error(res.samples.front().applied, res.samples.front().applied.head<3>()), 1e-12);
}

TEST(Experiments, InfeasibleHoverThrows) {
  const auto p = preset("quadrotor");
  EXPECT_THROW(moment_step_experiment(p, orientation_from_phi_theta(0.5, 0), Vec3::UnitX(), 1, 0.1, 1e-3),
               InvariantError);
}

TEST(Experiments, Deterministic) {
  const auto p = preset("trirotor-radial");
  const auto a = force_orientation_experiment(p, Mat3::Identity(), deg2rad(5), 0.2, 1e-3);
  const auto b = force_orientation_experiment(p, Mat3::Identity(), deg2rad(5), 0.2, 1e-3);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].h, b.samples[i].h);
}

TEST(Experiments, TrirotorRespondsSlowerThanQuadrotorEarly) {
  const auto tri = preset("dualtilt-trirotor");
  const auto quad = preset("quadrotor");
  const auto a = moment_step_experiment(tri, orientation_from_phi_theta(deg2rad(90), 0), Vec3::UnitX(), 0.5, 0.1, 1e-3);
  const auto b = moment_step_experiment(quad, Mat3::Identity(), Vec3::UnitX(), 0.5, 0.1, 1e-3);
  EXPECT_LT(a.early_moment_integral, b.early_moment_integral);
}
