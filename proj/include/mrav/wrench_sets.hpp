#pragma once

#include "mrav/allocation.hpp"
#include "mrav/direction_grid.hpp"
#include "mrav/parallel.hpp"
#include "mrav/simplex.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mrav {

enum class SetKind { Force, Moment };

/// Point cloud whose support function stands in for a convex set.
struct SampledConvexSet {
  SetKind kind = SetKind::Force;
  std::vector<Vec3> points;

  bool empty() const { return points.empty(); }
};

inline double support(const SampledConvexSet& set, const Vec3& d) {
  if (set.empty()) throw InputError("support of an empty set");
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& p : set.points) h = std::max(h, d.dot(p));
  return h;
}

struct SetOptions {
  int sphere_level = 3;   // icosphere subdivisions for an unlimited dual tilt (642 vertices)
  int arc_segments = 64;  // chords along a radial tilt arc
  int cap_grid = 24;      // alpha x beta samples for an angle-limited dual tilt
  double rank_tol = kDefaultRankTol;
  int threads = 1;
};

/// Inner polytope of every functional propeller's reachable thrust set,
/// written in the column basis of A'. The origin (zero thrust) is implicit:
/// each propeller's vertex weights sum to at most one.
struct VertexModel {
  AllocationMatrix reduced;
  std::vector<Eigen::Index> offsets;  // per functional propeller, first column in A'
  std::vector<int> dims;
  MatX vertices;            // dim(V') x K, one reduced input per column
  std::vector<int> owner;   // functional-propeller slot of each vertex
  MatX wrench;              // 6 x K, A' * vertices
  int slots = 0;
};

namespace detail {

inline std::vector<double> arc_samples(const AngleRange& r, int segments) {
  std::vector<double> a;
  if (r.full()) {
    for (int k = 0; k < segments; ++k) a.push_back(-kPi + 2.0 * kPi * k / segments);
  } else {
    for (int k = 0; k <= segments; ++k) a.push_back(r.lo + r.span() * k / segments);
  }
  return a;
}

/// Reachable unit thrust directions of one propeller, in V' coordinates.
inline std::vector<VecX> reachable_directions(const PropellerSpec& p, const SetOptions& opt) {
  std::vector<VecX> out;
  switch (p.tilt.kind) {
    case TiltKind::Fixed:
      out.push_back(VecX::Ones(1));
      break;
    case TiltKind::RadialOnly:
      for (double a : arc_samples(p.tilt.alpha, opt.arc_segments)) {
        VecX v(2);
        v << std::cos(a), std::sin(a);
        out.push_back(v);
      }
      break;
    case TiltKind::Dual:
      if (p.tilt.alpha.full() && p.tilt.beta.full()) {
        for (const auto& d : icosphere_vertices(opt.sphere_level)) out.push_back(d);
      } else {
        const auto as = arc_samples(p.tilt.alpha, opt.cap_grid);
        const auto bs = arc_samples(p.tilt.beta, opt.cap_grid);
        for (double a : as)
          for (double b : bs) out.push_back(thrust_direction(a, b, p.gamma));
      }
      break;
  }
  return out;
}

}  // namespace detail

inline VertexModel build_vertex_model(const PlatformSpec& platform, const SetOptions& opt = {}) {
  VertexModel vm;
  vm.reduced = reduced_allocation(platform);
  const auto idx = platform.active();
  vm.slots = static_cast<int>(idx.size());
  std::vector<std::vector<VecX>> per;
  Eigen::Index off = 0, total = 0;
  for (int i : idx) {
    const auto& p = platform.propellers[i];
    vm.offsets.push_back(off);
    vm.dims.push_back(p.tilt.reduced_dim());
    off += p.tilt.reduced_dim();
    per.push_back(detail::reachable_directions(p, opt));
    total += static_cast<Eigen::Index>(per.back().size());
  }
  vm.vertices = MatX::Zero(off, total);
  Eigen::Index k = 0;
  for (int s = 0; s < vm.slots; ++s) {
    const double umax = platform.propellers[idx[s]].u_max;
    for (const auto& d : per[s]) {
      vm.vertices.block(vm.offsets[s], k, vm.dims[s], 1) = umax * d;
      vm.owner.push_back(s);
      ++k;
    }
  }
  vm.wrench = vm.reduced.m * vm.vertices;
  return vm;
}

/// maximize objective . w  over  w = A' V', V' in the vertex model, with
/// optional linear rows on w:  eq w = eq_rhs,  ub w <= ub_rhs.
struct VertexLp {
  Vec6 objective = Vec6::Zero();
  MatX eq = MatX(0, 6);
  VecX eq_rhs = VecX(0);
  MatX ub = MatX(0, 6);
  VecX ub_rhs = VecX(0);
};

struct VertexLpResult {
  LpStatus status = LpStatus::Infeasible;
  VecX reduced_input;  // V'
  Vec6 wrench = Vec6::Zero();
  double objective = 0.0;
};

inline VertexLpResult solve_vertex_lp(const VertexModel& vm, const VertexLp& q, const LpOptions& opt = {}) {
  const Eigen::Index k = vm.wrench.cols();
  LinearProgram lp;
  lp.c = (q.objective.transpose() * vm.wrench).transpose();
  lp.a_eq = q.eq * vm.wrench;
  lp.b_eq = q.eq_rhs;
  lp.a_ub = MatX::Zero(vm.slots + q.ub.rows(), k);
  lp.b_ub = VecX::Ones(vm.slots + q.ub.rows());
  for (Eigen::Index j = 0; j < k; ++j) lp.a_ub(vm.owner[j], j) = 1.0;
  if (q.ub.rows() > 0) {
    lp.a_ub.bottomRows(q.ub.rows()) = q.ub * vm.wrench;
    lp.b_ub.tail(q.ub.rows()) = q.ub_rhs;
  }
  const LpResult r = solve_lp(lp, opt);
  VertexLpResult out;
  out.status = r.status;
  if (r.status != LpStatus::Optimal) return out;
  out.reduced_input = vm.vertices * r.x;
  out.wrench = vm.wrench * r.x;
  out.objective = r.objective;
  return out;
}

inline MatX moment_rows_selector() {
  MatX e = MatX::Zero(3, 6);
  e.rightCols(3) = MatX::Identity(3, 3);
  return e;
}

/// Support of the zero-moment force set in direction d, with its maximizer.
inline VertexLpResult max_force_at_zero_moment(const VertexModel& vm, const Vec3& d) {
  VertexLp q;
  q.objective.head<3>() = d;
  q.eq = moment_rows_selector();
  q.eq_rhs = VecX::Zero(3);
  return solve_vertex_lp(vm, q);
}

struct DirectionalSupport {
  std::vector<Vec3> dirs;
  std::vector<double> values;
  SampledConvexSet cloud;
};

inline DirectionalSupport force_support_on_grid(const VertexModel& vm, const DirectionGrid& grid, int threads) {
  DirectionalSupport out;
  out.dirs = grid.dirs;
  out.values.assign(grid.size(), 0.0);
  out.cloud.kind = SetKind::Force;
  out.cloud.points.assign(grid.size(), Vec3::Zero());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const auto r = max_force_at_zero_moment(vm, grid.dirs[i]);
    if (r.status == LpStatus::Optimal) {
      out.values[i] = r.objective;
      out.cloud.points[i] = r.wrench.head<3>();
    }
  });
  return out;
}

/// Zero-moment force set, sampled as the LP maximizer for each grid
/// direction. Only V' = 0 feasible gives the single point {0}.
inline SampledConvexSet force_set_at_hover(const PlatformSpec& platform, int resolution, const SetOptions& opt = {}) {
  const auto vm = build_vertex_model(platform, opt);
  return force_support_on_grid(vm, DirectionGrid::fibonacci(resolution), opt.threads).cloud;
}

struct OdlResult {
  double odl = 0.0;          // [N]
  int directions = 0;
  Vec3 min_direction = Vec3::UnitZ();
  int resolution = 0;
};

/// Radius of the largest origin-centred ball inside the zero-moment force
/// set; 0 when the origin is not interior.
inline OdlResult odl(const PlatformSpec& platform, int resolution, const SetOptions& opt = {}) {
  const auto vm = build_vertex_model(platform, opt);
  const auto grid = DirectionGrid::fibonacci(resolution);
  const auto sup = force_support_on_grid(vm, grid, opt.threads);
  OdlResult r;
  r.resolution = resolution;
  r.directions = static_cast<int>(grid.size());
  const auto it = std::min_element(sup.values.begin(), sup.values.end());
  r.odl = std::max(0.0, *it);
  r.min_direction = grid.dirs[static_cast<std::size_t>(it - sup.values.begin())];
  return r;
}

/// Inscribed-disc radius of the zero-moment force set within the plane
/// orthogonal to `plane_normal`: every in-plane force direction is reachable
/// with zero moment at this magnitude.
inline double planar_lift(const VertexModel& vm, const Vec3& plane_normal, int resolution) {
  const Vec3 n = plane_normal.normalized();
  Vec3 a = n.cross(Vec3::UnitX());
  if (a.norm() < 1e-6) a = n.cross(Vec3::UnitY());
  a.normalize();
  const Vec3 b = n.cross(a);
  VertexLp q;
  q.eq = MatX::Zero(4, 6);
  q.eq.block(0, 3, 3, 3) = Mat3::Identity();
  q.eq.block(3, 0, 1, 3) = n.transpose();
  q.eq_rhs = VecX::Zero(4);
  double lift = std::numeric_limits<double>::infinity();
  for (int k = 0; k < resolution; ++k) {
    const double t = 2.0 * kPi * k / resolution;
    q.objective.head<3>() = std::cos(t) * a + std::sin(t) * b;
    const auto r = solve_vertex_lp(vm, q);
    lift = std::min(lift, r.status == LpStatus::Optimal ? r.objective : 0.0);
  }
  return std::max(0.0, lift);
}

inline double planar_lift(const PlatformSpec& platform, const Vec3& plane_normal, int resolution,
                          const SetOptions& opt = {}) {
  return planar_lift(build_vertex_model(platform, opt), plane_normal, resolution);
}

struct PlanarLiftResult {
  double lift = 0.0;
  Vec3 normal = Vec3::UnitZ();
};

/// Best plane: coarse search over hemisphere normals, then a local
/// refinement around the best candidate.
inline PlanarLiftResult best_planar_lift(const PlatformSpec& platform, int resolution, int normals = 96,
                                         const SetOptions& opt = {}) {
  const auto vm = build_vertex_model(platform, opt);
  auto grid = DirectionGrid::fibonacci(2 * normals);
  std::vector<Vec3> cands(grid.dirs.begin(), grid.dirs.begin() + grid.size() / 2);
  for (int k = 0; k < 3; ++k) cands.push_back(Vec3::Unit(k));
  std::vector<double> vals(cands.size());
  parallel_for(cands.size(), opt.threads, [&](std::size_t i) { vals[i] = planar_lift(vm, cands[i], resolution); });
  std::size_t best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  PlanarLiftResult res{vals[best], cands[best]};
  double step = grid.spacing();
  for (int round = 0; round < 4; ++round) {
    Vec3 u = res.normal.cross(Vec3::UnitX());
    if (u.norm() < 1e-6) u = res.normal.cross(Vec3::UnitY());
    u.normalize();
    const Vec3 v = res.normal.cross(u);
    std::vector<Vec3> local;
    for (int k = 0; k < 8; ++k) {
      const double t = 2.0 * kPi * k / 8;
      local.push_back((res.normal + step * (std::cos(t) * u + std::sin(t) * v)).normalized());
    }
    std::vector<double> lv(local.size());
    parallel_for(local.size(), opt.threads, [&](std::size_t i) { lv[i] = planar_lift(vm, local[i], resolution); });
    for (std::size_t i = 0; i < local.size(); ++i)
      if (lv[i] > res.lift) res = {lv[i], local[i]};
    step *= 0.5;
  }
  return res;
}

/// 26 lift directions: cube faces, edges and corners.
inline std::vector<Vec3> coarse_lift_directions() {
  std::vector<Vec3> out;
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y)
      for (int z = -1; z <= 1; ++z)
        if (x || y || z) out.push_back(Vec3(x, y, z).normalized());
  return out;
}

/// Moments reachable while lifting at least the weight. The norm bound is
/// replaced by the union over 26 half-space restrictions l . f >= m g.
/// Throws InvariantError when no restriction is feasible (cannot lift).
inline SampledConvexSet moment_set_at_hover(const PlatformSpec& platform, int resolution,
                                            const SetOptions& opt = {}) {
  const auto vm = build_vertex_model(platform, opt);
  const auto grid = DirectionGrid::fibonacci(resolution);
  const auto lifts = coarse_lift_directions();
  const double mg = platform.weight();
  std::vector<std::vector<Vec3>> pts(lifts.size());
  std::vector<char> feasible(lifts.size(), 0);
  parallel_for(lifts.size(), opt.threads, [&](std::size_t li) {
    VertexLp q;
    q.ub = MatX::Zero(1, 6);
    q.ub.block(0, 0, 1, 3) = -lifts[li].transpose();
    q.ub_rhs = VecX::Constant(1, -mg);
    for (const auto& d : grid.dirs) {
      q.objective.setZero();
      q.objective.tail<3>() = d;
      const auto r = solve_vertex_lp(vm, q);
      if (r.status != LpStatus::Optimal) return;  // restriction infeasible for every direction
      feasible[li] = 1;
      pts[li].push_back(r.wrench.tail<3>());
    }
  });
  SampledConvexSet m{SetKind::Moment, {}};
  for (std::size_t li = 0; li < lifts.size(); ++li)
    if (feasible[li]) m.points.insert(m.points.end(), pts[li].begin(), pts[li].end());
  if (m.empty())
    throw InvariantError("lift", "platform cannot produce a force of magnitude m g (" + std::to_string(mg) +
                                     " N) in any direction");
  return m;
}

/// Origin-centred inscribed radius of a sampled set over a direction grid;
/// non-positive means the origin is not interior.
inline double inscribed_radius(const SampledConvexSet& set, const DirectionGrid& grid) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& d : grid.dirs) r = std::min(r, support(set, d));
  return r;
}

}  // namespace mrav
