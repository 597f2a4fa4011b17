#pragma once

#include "mrav/mrav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace mrav::oracle {

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random platform with n propellers; tilt kinds drawn from `kinds`.
inline PlatformSpec random_platform(std::mt19937& rng, int n, const std::vector<TiltKind>& kinds) {
  PlatformSpec p;
  p.name = "random";
  p.mass = uniform(rng, 0.5, 2.0);
  p.inertia = Vec3(uniform(rng, 0.005, 0.02), uniform(rng, 0.005, 0.02), uniform(rng, 0.01, 0.04)).asDiagonal();
  for (int i = 0; i < n; ++i) {
    PropellerSpec q;
    const double az = 2.0 * kPi * i / n + uniform(rng, -0.3, 0.3);
    const double l = uniform(rng, 0.1, 0.3);
    q.position = Vec3(l * std::cos(az), l * std::sin(az), uniform(rng, -0.05, 0.05));
    q.gamma = azimuth_of(q.position);
    q.drag_ratio = (i % 2 ? -1.0 : 1.0) * uniform(rng, 0.005, 0.02);
    const TiltKind k = kinds[std::uniform_int_distribution<std::size_t>(0, kinds.size() - 1)(rng)];
    switch (k) {
      case TiltKind::Fixed: q.tilt = TiltCapability::fixed(Vec3(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), 1.0).normalized()); break;
      case TiltKind::RadialOnly: q.tilt = TiltCapability::radial(); break;
      case TiltKind::Dual: q.tilt = TiltCapability::dual(); break;
    }
    q.u_max = p.mass * p.gravity * uniform(rng, 0.8, 1.5);
    q.u_rate_max = uniform(rng, 50, 300);
    q.angle_rate_max = uniform(rng, 2, 6);
    p.propellers.push_back(q);
  }
  return p;
}

/// Random control with thrusts in [lo, hi] * u_max and angles inside their ranges.
inline ControlInput random_control(std::mt19937& rng, const PlatformSpec& p, double lo = 0.05, double hi = 0.95) {
  ControlInput h = zero_control(p);
  const auto idx = p.active();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& q = p.propellers[idx[j]];
    h.props[j].u = q.u_max * uniform(rng, lo, hi);
    if (q.tilt.num_angles() >= 1) h.props[j].alpha = uniform(rng, q.tilt.alpha.lo, q.tilt.alpha.hi);
    if (q.tilt.num_angles() == 2) h.props[j].beta = uniform(rng, q.tilt.beta.lo, q.tilt.beta.hi);
  }
  return h;
}

/// Wrench from the per-propeller sum, written out directly.
inline Vec6 wrench_by_hand(const PlatformSpec& p, const ControlInput& h) {
  Vec6 w = Vec6::Zero();
  const auto idx = p.active();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& q = p.propellers[idx[j]];
    const auto& c = h.props[j];
    Vec3 dir;
    if (q.tilt.kind == TiltKind::Fixed) {
      dir = q.tilt.direction.normalized();
    } else {
      const double a = c.alpha, b = q.tilt.kind == TiltKind::Dual ? c.beta : 0.0;
      const Vec3 loc(-std::sin(b), std::sin(a) * std::cos(b), std::cos(a) * std::cos(b));
      dir = rot_z(q.gamma) * loc;
    }
    const Vec3 f = c.u * dir;
    w.head<3>() += f;
    w.tail<3>() += q.position.cross(f) + q.drag_ratio * f;
  }
  return w;
}

/// Central finite differences of the wrench in the control vector.
inline MatX jacobian_fd(const PlatformSpec& p, const ControlInput& h, double step = 1e-6) {
  const VecX x = h.to_vector(p);
  MatX j(6, x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    VecX a = x, b = x;
    a[k] += step;
    b[k] -= step;
    j.col(k) = (wrench_of(p, ControlInput::from_vector(p, a)).stacked() -
                wrench_of(p, ControlInput::from_vector(p, b)).stacked()) /
               (2.0 * step);
  }
  return j;
}

/// Support of the exact zero-moment force set of a platform with unlimited
/// tilts, by convex duality: h(d) = min over mu of sum_i u_max_i s_i(B_i^T [d; mu]),
/// with s_i the support of propeller i's unit reachable set in its block
/// coordinates. Minimized by Nelder-Mead from several starts.
inline double exact_zero_moment_support(const PlatformSpec& p, const Vec3& d) {
  struct Block {
    Eigen::Matrix<double, 6, Eigen::Dynamic> b;
    TiltKind kind;
    double u_max;
  };
  std::vector<Block> blocks;
  for (auto i : p.active()) {
    const auto& q = p.propellers[i];
    Eigen::Matrix<double, 6, 3> blk;
    blk.topRows<3>() = Mat3::Identity();
    blk.bottomRows<3>() = skew(q.position) + q.drag_ratio * Mat3::Identity();
    Eigen::Matrix<double, 6, Eigen::Dynamic> b;
    if (q.tilt.kind == TiltKind::Dual) {
      b = blk;
    } else if (q.tilt.kind == TiltKind::RadialOnly) {
      MatX w(3, 2);
      w.col(0) = rot_z(q.gamma) * Vec3(0, 0, 1);
      w.col(1) = rot_z(q.gamma) * Vec3(0, 1, 0);
      b = blk * w;
    } else {
      b = blk * q.tilt.direction.normalized();
    }
    blocks.push_back({b, q.tilt.kind, q.u_max});
  }
  auto dual = [&](const Vec3& mu) {
    Vec6 c;
    c << d, mu;
    double s = 0;
    for (const auto& bl : blocks) {
      const VecX y = bl.b.transpose() * c;
      s += bl.u_max * (bl.kind == TiltKind::Fixed ? std::max(0.0, y[0]) : y.norm());
    }
    return s;
  };
  double best = std::numeric_limits<double>::infinity();
  for (double scale : {0.1, 1.0, 10.0}) {
    std::array<Vec3, 4> x = {Vec3::Zero(), Vec3(scale, 0, 0), Vec3(0, scale, 0), Vec3(0, 0, scale)};
    std::array<double, 4> fx;
    for (int i = 0; i < 4; ++i) fx[i] = dual(x[i]);
    for (int it = 0; it < 4000; ++it) {
      std::array<int, 4> o = {0, 1, 2, 3};
      std::sort(o.begin(), o.end(), [&](int a, int b) { return fx[a] < fx[b]; });
      const Vec3 c = (x[o[0]] + x[o[1]] + x[o[2]]) / 3.0;
      const Vec3 xr = c + (c - x[o[3]]);
      const double fr = dual(xr);
      if (fr < fx[o[0]]) {
        const Vec3 xe = c + 2.0 * (c - x[o[3]]);
        const double fe = dual(xe);
        if (fe < fr) { x[o[3]] = xe; fx[o[3]] = fe; } else { x[o[3]] = xr; fx[o[3]] = fr; }
      } else if (fr < fx[o[2]]) {
        x[o[3]] = xr;
        fx[o[3]] = fr;
      } else {
        const Vec3 xc = c + 0.5 * (x[o[3]] - c);
        const double fc = dual(xc);
        if (fc < fx[o[3]]) {
          x[o[3]] = xc;
          fx[o[3]] = fc;
        } else {
          for (int k = 1; k < 4; ++k) {
            x[o[k]] = x[o[0]] + 0.5 * (x[o[k]] - x[o[0]]);
            fx[o[k]] = dual(x[o[k]]);
          }
        }
      }
    }
    best = std::min(best, *std::min_element(fx.begin(), fx.end()));
  }
  return best;
}

/// Zonotope support by enumerating all 2^k sign patterns.
inline double zonotope_support_brute(const MatX& g, const Vec3& d) {
  const int k = static_cast<int>(g.cols());
  double best = -std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << k); ++mask) {
    Vec3 x = Vec3::Zero();
    for (int j = 0; j < k; ++j) x += ((mask >> j) & 1 ? 1.0 : -1.0) * g.col(j);
    best = std::max(best, d.dot(x));
  }
  return best;
}

inline Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

}  // namespace mrav::oracle
