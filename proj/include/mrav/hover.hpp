#pragma once

#include "mrav/allocation.hpp"
#include "mrav/wrench_sets.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace mrav {

struct HoverOptions {
  double thrust_margin = 0.02;          // interior band: [m, 1 - m] * u_max
  double angle_margin = deg2rad(2.0);   // distance from finite angle limits
  double force_tol = 1e-6;              // [N]
  double moment_tol = 1e-8;             // [N m]
  double rank_tol = kDefaultRankTol;
  int search_directions = 256;          // candidate hover directions when searching
  int odl_resolution = 2048;
  SetOptions sets;
};

enum class HoverStatus { Interior, Boundary, Infeasible };

inline const char* to_string(HoverStatus s) {
  switch (s) {
    case HoverStatus::Interior: return "interior";
    case HoverStatus::Boundary: return "boundary";
    case HoverStatus::Infeasible: return "infeasible";
  }
  return "?";
}

struct HoverSolution {
  HoverStatus status = HoverStatus::Infeasible;
  Mat3 orientation = Mat3::Identity();  // R_B^h, body to world
  ControlInput control;                 // H0
  VecX reduced_input;                   // V'_0
  double force_error = 0.0;             // [N]
  double moment_error = 0.0;            // [N m]

  bool feasible() const { return status != HoverStatus::Infeasible; }
  bool interior() const { return status == HoverStatus::Interior; }
};

/// Body-frame wrench that holds the platform still at orientation R_h.
inline Vec6 hover_wrench(const PlatformSpec& platform, const Mat3& r_h) {
  Vec6 w;
  w << r_h.transpose() * Vec3(0, 0, platform.weight()), Vec3::Zero();
  return w;
}

/// Thrust and tilt angles producing `v` (body frame) on a dual-tilt
/// propeller. Picks whichever of the two equivalent (alpha, beta) pairs
/// satisfies the limits; alpha = 0 when beta = +-pi/2.
inline PropellerCommand dual_angles_for(const PropellerSpec& p, const Vec3& v, const PropellerCommand& previous) {
  PropellerCommand c = previous;
  c.u = v.norm();
  if (c.u < 1e-15) {
    c.u = 0.0;
    return c;
  }
  const Vec3 loc = rot_z(-p.gamma) * (v / c.u);
  double beta = std::asin(std::clamp(-loc.x(), -1.0, 1.0));
  double alpha = std::hypot(loc.y(), loc.z()) < 1e-12 ? 0.0 : std::atan2(loc.y(), loc.z());
  if (!(p.tilt.alpha.contains(alpha) && p.tilt.beta.contains(beta))) {
    const double a2 = alpha > 0 ? alpha - kPi : alpha + kPi;
    const double b2 = beta > 0 ? kPi - beta : -kPi - beta;
    if (p.tilt.alpha.contains(a2) && p.tilt.beta.contains(b2)) {
      alpha = a2;
      beta = b2;
    }
  }
  c.alpha = alpha;
  c.beta = beta;
  return c;
}

/// Maps reduced inputs V' back to a control input. Zero-thrust propellers
/// keep the angles of `previous` (or 0).
inline ControlInput lift_reduced(const PlatformSpec& platform, const VecX& v_red,
                                 const ControlInput* previous = nullptr) {
  const auto idx = platform.active();
  ControlInput h = previous ? *previous : zero_control(platform);
  Eigen::Index off = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& p = platform.propellers[idx[j]];
    auto& c = h.props[j];
    switch (p.tilt.kind) {
      case TiltKind::Fixed:
        c.u = v_red[off];
        off += 1;
        break;
      case TiltKind::RadialOnly: {
        const double a = v_red[off], b = v_red[off + 1];
        c.u = std::hypot(a, b);
        if (c.u > 1e-15) c.alpha = std::atan2(b, a);
        c.beta = 0.0;
        off += 2;
        break;
      }
      case TiltKind::Dual:
        c = dual_angles_for(p, v_red.segment<3>(off), c);
        off += 3;
        break;
    }
  }
  return h;
}

/// Distance to the nearest actuation limit, in units of the margins: >= 1
/// everywhere means strictly interior, >= 0 feasible.
inline double interior_score(const PlatformSpec& platform, const ControlInput& h, const HoverOptions& opt) {
  const auto idx = platform.active();
  double score = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& p = platform.propellers[idx[j]];
    const auto& c = h.props[j];
    const double band = opt.thrust_margin * p.u_max;
    score = std::min(score, std::min(c.u, p.u_max - c.u) / band);
    auto angle = [&](const AngleRange& r, double a) {
      if (r.full()) return;
      score = std::min(score, std::min(a - r.lo, r.hi - a) / opt.angle_margin);
    };
    if (p.tilt.num_angles() >= 1) angle(p.tilt.alpha, c.alpha);
    if (p.tilt.num_angles() == 2) angle(p.tilt.beta, c.beta);
  }
  return score;
}

/// Hover solver for one platform. Holds A', its pseudo-inverse and the
/// inner polytope model; solve() is const and safe to call concurrently.
class HoverSolver {
 public:
  explicit HoverSolver(PlatformSpec platform, HoverOptions opt = {})
      : platform_(std::move(platform)), opt_(opt), reduced_(reduced_allocation(platform_)),
        pinv_(pseudo_inverse(reduced_.m, opt_.rank_tol)), vm_(build_vertex_model(platform_, opt_.sets)) {}

  const PlatformSpec& platform() const { return platform_; }
  const HoverOptions& options() const { return opt_; }
  const AllocationMatrix& reduced() const { return reduced_; }
  const VertexModel& vertex_model() const { return vm_; }

  /// Finds an interior H0 producing body force R_h^T m g z_W and zero moment.
  /// The minimum-norm reduced input is preferred; when it violates a limit
  /// the min-max-thrust LP solution is blended part way toward it.
  HoverSolution solve(const Mat3& r_h) const {
    HoverSolution sol;
    sol.orientation = r_h;
    const Vec6 w = hover_wrench(platform_, r_h);
    const double scale = std::max(1.0, platform_.weight());
    const VecX v0 = pinv_ * w;
    if ((reduced_.m * v0 - w).norm() > 1e-9 * scale) return sol;  // target outside range(A')

    VecX v = v0;
    if (!reduced_feasible(v0, 1.0)) {
      auto lp = min_max_thrust(w);
      if (!lp) return sol;
      v = *lp;
      // Step toward v0, halfway to where the (1 - margin) band is hit.
      double lo = 0.0, hi = 1.0;
      if (reduced_feasible(v, 1.0)) {
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          (reduced_feasible((1 - mid) * v + mid * v0, 1.0) ? lo : hi) = mid;
        }
        v = (1 - 0.5 * lo) * v + 0.5 * lo * v0;
      }
      v += pinv_ * (w - reduced_.m * v);
    }
    return finish(sol, v, w);
  }

  HoverSolution solve(double phi, double theta) const { return solve(orientation_from_phi_theta(phi, theta)); }

 private:
  /// Feasible with the thrust band shrunk by `margins` thrust margins.
  bool reduced_feasible(const VecX& v, double margins) const {
    const auto h = lift_reduced(platform_, v);
    const auto idx = platform_.active();
    Eigen::Index off = 0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto& p = platform_.propellers[idx[j]];
      const int dim = p.tilt.reduced_dim();
      if (p.tilt.kind == TiltKind::Fixed && v[off] < -1e-12) return false;
      off += dim;
      const double band = margins * opt_.thrust_margin * p.u_max;
      if (h.props[j].u > p.u_max - band + 1e-12) return false;
    }
    return control_violation(platform_, h).empty();
  }

  std::optional<VecX> min_max_thrust(const Vec6& w) const {
    const Eigen::Index k = vm_.wrench.cols();
    LinearProgram lp;
    lp.c = VecX::Zero(k + 1);
    lp.c[k] = -1.0;  // minimize t
    lp.a_eq = MatX::Zero(6, k + 1);
    lp.a_eq.leftCols(k) = vm_.wrench;
    lp.b_eq = w;
    lp.a_ub = MatX::Zero(vm_.slots * 2, k + 1);
    lp.b_ub = VecX::Zero(vm_.slots * 2);
    for (Eigen::Index j = 0; j < k; ++j) {
      lp.a_ub(vm_.owner[j], j) = 1.0;
      lp.a_ub(vm_.slots + vm_.owner[j], j) = 1.0;
    }
    for (int s = 0; s < vm_.slots; ++s) {
      lp.a_ub(s, k) = -1.0;
      lp.b_ub[vm_.slots + s] = 1.0;
    }
    const auto r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) return std::nullopt;
    return VecX(vm_.vertices * r.x.head(k));
  }

  HoverSolution finish(HoverSolution sol, const VecX& v, const Vec6& w) const {
    sol.reduced_input = v;
    sol.control = lift_reduced(platform_, v);
    const Wrench got = wrench_of(platform_, sol.control);
    sol.force_error = (got.force - w.head<3>()).norm();
    sol.moment_error = got.moment.norm();
    if (!control_violation(platform_, sol.control).empty() || sol.force_error > opt_.force_tol ||
        sol.moment_error > opt_.moment_tol) {
      sol.status = HoverStatus::Infeasible;
      return sol;
    }
    sol.status = interior_score(platform_, sol.control, opt_) >= 1.0 ? HoverStatus::Interior : HoverStatus::Boundary;
    return sol;
  }

  PlatformSpec platform_;
  HoverOptions opt_;
  AllocationMatrix reduced_;
  MatX pinv_;
  VertexModel vm_;
};

inline HoverSolution solve_hover(const PlatformSpec& platform, const Mat3& r_h, const HoverOptions& opt = {}) {
  return HoverSolver(platform, opt).solve(r_h);
}

struct HoverCapability {
  bool capable = false;
  int rank_moment = 0;            // rank(A'_m)
  double max_force = 0.0;         // largest zero-moment force found [N]
  Vec3 hover_direction = Vec3::UnitZ();  // body-frame force direction of the witness
  bool moment_set_interior = false;      // 0 in interior(M)
  std::optional<HoverSolution> witness;
};

/// Candidate body-frame hover force directions, best first. Rank-1 hover
/// force sets give their single direction; otherwise z_B first, then grid
/// directions by decreasing zero-moment support.
inline std::vector<std::pair<Vec3, double>> hover_direction_candidates(const HoverSolver& solver) {
  const auto& vm = solver.vertex_model();
  const auto& opt = solver.options();
  std::vector<std::pair<Vec3, double>> out;
  auto sup = [&](const Vec3& d) {
    const auto r = max_force_at_zero_moment(vm, d);
    return r.status == LpStatus::Optimal ? r.objective : 0.0;
  };
  const MatX bm = moment_nullspace(solver.reduced(), opt.rank_tol);
  if (bm.cols() == 0) return out;
  const MatX af_bm = solver.reduced().force() * bm;
  if (numeric_rank(af_bm, opt.rank_tol) == 1) {
    Eigen::JacobiSVD<MatX> svd(af_bm, Eigen::ComputeThinU);
    const Vec3 u = svd.matrixU().col(0);
    const double hp = sup(u), hm = sup(-u);
    out.emplace_back(hp >= hm ? u : Vec3(-u), std::max(hp, hm));
    return out;
  }
  out.emplace_back(Vec3::UnitZ(), sup(Vec3::UnitZ()));
  const auto grid = DirectionGrid::fibonacci(opt.search_directions);
  std::vector<std::pair<Vec3, double>> rest(grid.size());
  parallel_for(grid.size(), opt.sets.threads, [&](std::size_t i) { rest[i] = {grid.dirs[i], sup(grid.dirs[i])}; });
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

/// Static hover test: rank(A'_m) = 3 and an interior V' lifting m g at
/// zero moment. The witness is the hover solution at the first candidate
/// direction that admits one.
inline HoverCapability can_statically_hover(const PlatformSpec& platform, const HoverOptions& opt = {}) {
  HoverCapability cap;
  const HoverSolver solver(platform, opt);
  cap.rank_moment = numeric_rank(solver.reduced().moment(), opt.rank_tol);
  const auto cands = hover_direction_candidates(solver);
  for (const auto& c : cands) cap.max_force = std::max(cap.max_force, c.second);
  if (cap.rank_moment == 3) {
    int tried = 0;
    for (const auto& [dir, h] : cands) {
      if (h <= platform.weight()) continue;
      if (++tried > 16) break;
      auto sol = solver.solve(rotation_aligning_to_world_z(dir));
      if (sol.interior()) {
        cap.hover_direction = dir;
        cap.witness = std::move(sol);
        cap.capable = true;
        break;
      }
      if (sol.feasible() && !cap.witness) {
        cap.hover_direction = dir;
        cap.witness = std::move(sol);
      }
    }
  }
  try {
    const auto m = moment_set_at_hover(platform, 64, opt.sets);
    cap.moment_set_interior = inscribed_radius(m, DirectionGrid::fibonacci(64)) > 1e-9;
  } catch (const InvariantError&) {
    cap.moment_set_interior = false;
  }
  return cap;
}

struct HoverCell {
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  HoverSolution solution;
};

/// Orientation grid phi, theta in [-180, 180) deg with the given step;
/// rotation about x_B by phi then about y_B by theta. Row-major in phi.
inline std::vector<std::pair<double, double>> orientation_grid(double step_deg) {
  std::vector<std::pair<double, double>> g;
  const int n = static_cast<int>(std::lround(360.0 / step_deg));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.emplace_back(-180.0 + i * step_deg, -180.0 + j * step_deg);
  return g;
}

inline std::vector<HoverCell> hover_orientation_set(const PlatformSpec& platform, double step_deg,
                                                    const HoverOptions& opt = {}) {
  const HoverSolver solver(platform, opt);
  const auto grid = orientation_grid(step_deg);
  std::vector<HoverCell> cells(grid.size());
  parallel_for(grid.size(), opt.sets.threads, [&](std::size_t i) {
    cells[i].phi_deg = grid[i].first;
    cells[i].theta_deg = grid[i].second;
    cells[i].solution = solver.solve(deg2rad(grid[i].first), deg2rad(grid[i].second));
  });
  return cells;
}

/// Frozen-propeller hover test at the angles of `h0`: rank of the fixed
/// allocation's moment rows is 3 and some strictly interior thrust vector
/// produces zero moment while lifting m g along the witness force direction.
inline bool frozen_hover_check(const PlatformSpec& platform, const ControlInput& h0, const HoverOptions& opt = {}) {
  const auto ff = fixed_allocation(platform, h0);
  if (numeric_rank(ff.moment(), opt.rank_tol) < 3) return false;
  const auto idx = platform.active();
  const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
  VecX delta(n), umax(n), u0(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    umax[j] = platform.propellers[idx[j]].u_max;
    delta[j] = opt.thrust_margin * umax[j];
    u0[j] = h0.props[j].u;
  }
  Vec3 d0 = ff.force() * u0;
  if (d0.norm() < 1e-12) return false;
  d0.normalize();
  // u = delta + x,  0 <= x <= umax - 2 delta
  LinearProgram lp;
  lp.c = VecX::Zero(n);
  lp.a_eq = ff.moment();
  lp.b_eq = -ff.moment() * delta;
  lp.a_ub = MatX::Zero(n + 1, n);
  lp.b_ub = VecX::Zero(n + 1);
  lp.a_ub.topRows(n) = MatX::Identity(n, n);
  lp.b_ub.head(n) = umax - 2.0 * delta;
  lp.a_ub.row(n) = -(d0.transpose() * ff.force());
  lp.b_ub[n] = -platform.weight() + d0.dot(ff.force() * delta);
  return solve_lp(lp).status == LpStatus::Optimal;
}

enum class PlatformClass { UDT, MDT, FA, OD, NotHoverable, NotClassified };

inline const char* to_string(PlatformClass c) {
  switch (c) {
    case PlatformClass::UDT: return "UDT";
    case PlatformClass::MDT: return "MDT";
    case PlatformClass::FA: return "FA";
    case PlatformClass::OD: return "OD";
    case PlatformClass::NotHoverable: return "NotHoverable";
    case PlatformClass::NotClassified: return "NotClassified";
  }
  return "?";
}

struct Classification {
  PlatformClass cls = PlatformClass::NotHoverable;
  int rank_af = 0;        // rank of the zero-moment force map, rank(A'_f B_m)
  int rank_af_full = 0;   // rank(A'_f)
  int rank_a = 0;         // rank(A')
  int rank_am = 0;        // rank(A'_m)
  int dof = 0;
  double odl = 0.0;       // [N]
  double weight = 0.0;    // m g [N]
  bool csh = false;
  std::optional<HoverSolution> witness;
};

/// Orientations probed by the CSH test besides the capability witness.
inline std::vector<Mat3> csh_probe_orientations() {
  std::vector<Mat3> out;
  const std::vector<Vec3> dirs = {Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(1, 0, 0), Vec3(-1, 0, 0),
                                  Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(1, 1, 1).normalized()};
  for (const Vec3& d : dirs)
    out.push_back(rotation_aligning_to_world_z(d));
  return out;
}

/// Critically statically hoverable: hovers, but every tested hover witness
/// fails once its propeller angles are frozen.
inline bool is_csh(const PlatformSpec& platform, const HoverCapability& cap, const HoverOptions& opt = {}) {
  if (!cap.capable || !cap.witness) return false;
  if (frozen_hover_check(platform, cap.witness->control, opt)) return false;
  const HoverSolver solver(platform, opt);
  for (const auto& r : csh_probe_orientations()) {
    const auto sol = solver.solve(r);
    if (sol.interior() && frozen_hover_check(platform, sol.control, opt)) return false;
  }
  return true;
}

inline bool is_csh(const PlatformSpec& platform, const HoverOptions& opt = {}) {
  return is_csh(platform, can_statically_hover(platform, opt), opt);
}

inline Classification classify(const PlatformSpec& platform, const HoverOptions& opt = {}) {
  Classification c;
  const auto reduced = reduced_allocation(platform);
  c.rank_a = numeric_rank(reduced.m, opt.rank_tol);
  c.rank_af_full = numeric_rank(reduced.force(), opt.rank_tol);
  c.rank_am = numeric_rank(reduced.moment(), opt.rank_tol);
  c.rank_af = hover_force_rank(reduced, opt.rank_tol);
  c.dof = platform.dof();
  c.weight = platform.weight();
  const auto cap = can_statically_hover(platform, opt);
  c.witness = cap.witness;
  if (!cap.capable) {
    c.cls = PlatformClass::NotHoverable;
    return c;
  }
  c.csh = is_csh(platform, cap, opt);
  const bool fa = c.rank_af == 3 && c.rank_a == 6;
  if (fa) {
    c.odl = odl(platform, opt.odl_resolution, opt.sets).odl;
    c.cls = c.odl >= c.weight ? PlatformClass::OD : PlatformClass::FA;
  } else if (c.rank_af == 1 && c.rank_a == 4) {
    c.cls = PlatformClass::UDT;
  } else if (c.rank_af >= 2 && c.rank_af <= 3 && c.rank_a >= 5 && c.rank_a <= 6) {
    c.cls = PlatformClass::MDT;
  } else {
    c.cls = PlatformClass::NotClassified;
  }
  return c;
}

}  // namespace mrav
