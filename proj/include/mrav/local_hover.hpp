#pragma once

#include "mrav/hover.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mrav {

/// Symmetric rate bounds, one per column of the full Jacobian.
struct RateBox {
  VecX bounds;

  static RateBox of(const PlatformSpec& platform) {
    const auto idx = platform.active();
    std::vector<double> b;
    for (auto i : idx) b.push_back(platform.propellers[i].u_rate_max);
    for (auto i : idx) {
      const auto& p = platform.propellers[i];
      for (int k = 0; k < p.tilt.num_angles(); ++k) b.push_back(p.angle_rate_max);
    }
    return {Eigen::Map<const VecX>(b.data(), static_cast<Eigen::Index>(b.size()))};
  }

  /// Componentwise clamp of a rate vector into the box.
  VecX saturate(const VecX& rate) const { return rate.cwiseMax(-bounds).cwiseMin(bounds); }
};

/// Centred zonotope {G s : |s_j| <= 1}.
struct MomentZonotope {
  MatX generators = MatX(3, 0);  // [N m / s]

  double support(const Vec3& d) const { return (d.transpose() * generators).cwiseAbs().sum(); }

  /// Point of the zonotope maximizing d . x.
  Vec3 support_point(const Vec3& d) const {
    Vec3 x = Vec3::Zero();
    for (Eigen::Index j = 0; j < generators.cols(); ++j) {
      const double s = d.dot(generators.col(j));
      if (s > 0) x += generators.col(j);
      else if (s < 0) x -= generators.col(j);
    }
    return x;
  }
};

/// Moment rows of F(H0), each column scaled by its rate bound.
inline MomentZonotope local_moment_zonotope(const PlatformSpec& platform, const ControlInput& h0) {
  const auto f = full_jacobian(platform, h0);
  const auto box = RateBox::of(platform);
  return {f.moment() * box.bounds.asDiagonal()};
}

/// Force rows of F(H0) scaled the same way; bounds how fast the hover force drifts.
inline MatX local_force_generators(const PlatformSpec& platform, const ControlInput& h0) {
  const auto f = full_jacobian(platform, h0);
  return f.force() * RateBox::of(platform).bounds.asDiagonal();
}

struct LhiResult {
  double lhi = 0.0;  // [N m / s]
  Vec3 min_direction = Vec3::UnitZ();
};

inline LhiResult lhi(const MomentZonotope& z, const DirectionGrid& grid) {
  LhiResult r;
  r.lhi = std::numeric_limits<double>::infinity();
  for (const auto& d : grid.dirs) {
    const double h = z.support(d);
    if (h < r.lhi) {
      r.lhi = h;
      r.min_direction = d;
    }
  }
  if (grid.dirs.empty()) r.lhi = 0.0;
  return r;
}

inline LhiResult lhi(const PlatformSpec& platform, const ControlInput& h0, const DirectionGrid& grid) {
  return lhi(local_moment_zonotope(platform, h0), grid);
}

struct LhiCell {
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  bool feasible = false;
  double lhi = std::numeric_limits<double>::quiet_NaN();  // NaN where hover is infeasible
};

inline std::vector<LhiCell> lhi_map(const PlatformSpec& platform, double step_deg, const DirectionGrid& grid,
                                    const HoverOptions& opt = {}) {
  const HoverSolver solver(platform, opt);
  const auto cells = orientation_grid(step_deg);
  std::vector<LhiCell> out(cells.size());
  parallel_for(cells.size(), opt.sets.threads, [&](std::size_t i) {
    auto& c = out[i];
    c.phi_deg = cells[i].first;
    c.theta_deg = cells[i].second;
    const auto sol = solver.solve(deg2rad(c.phi_deg), deg2rad(c.theta_deg));
    if (!sol.feasible()) return;
    c.feasible = true;
    c.lhi = lhi(platform, sol.control, grid).lhi;
  });
  return out;
}

/// rank(F(H0)) == rank(A'). Requires every functional thrust >= min_thrust.
inline bool rank_equivalence_check(const PlatformSpec& platform, const ControlInput& h0,
                                   double min_thrust = 1e-6, double rank_tol = kDefaultRankTol) {
  check_dimensions(platform, h0);
  for (const auto& c : h0.props)
    if (c.u < min_thrust) throw InputError("rank_equivalence_check needs strictly positive thrusts");
  return numeric_rank(full_jacobian(platform, h0).m, rank_tol) ==
         numeric_rank(reduced_allocation(platform).m, rank_tol);
}

/// Whether the platform could keep hovering with its propeller angles frozen at h0.
inline bool fixed_orientation_sustain_check(const PlatformSpec& platform, const ControlInput& h0,
                                            const HoverOptions& opt = {}) {
  return frozen_hover_check(platform, h0, opt);
}

/// Joint scale k applied to mass, u_max and u_rate_max. LHI at a
/// hover witness is linear in k (thrusts and their rates scale together,
/// angles do not move), so one evaluation fixes it.
struct LhiCalibration {
  double scale = 1.0;
  double reference_lhi = 0.0;  // before scaling
  PlatformSpec platform;
};

inline PlatformSpec scale_platform(PlatformSpec p, double k) {
  p.mass *= k;
  for (auto& q : p.propellers) {
    q.u_max *= k;
    q.u_rate_max *= k;
  }
  return p;
}

inline LhiCalibration calibrate_lhi(const PlatformSpec& platform, double phi, double theta, double target,
                                    const DirectionGrid& grid, const HoverOptions& opt = {}) {
  const auto sol = solve_hover(platform, orientation_from_phi_theta(phi, theta), opt);
  if (!sol.feasible()) throw InvariantError("hover", "calibration orientation is not hoverable");
  LhiCalibration c;
  c.reference_lhi = lhi(platform, sol.control, grid).lhi;
  if (!(c.reference_lhi > 0)) throw InvariantError("lhi_positive", "zero LHI at the calibration orientation");
  c.scale = target / c.reference_lhi;
  c.platform = scale_platform(platform, c.scale);
  return c;
}

}  // namespace mrav
