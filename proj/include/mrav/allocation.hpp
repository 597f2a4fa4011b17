#pragma once

#include "mrav/linalg.hpp"
#include "mrav/platform.hpp"

#include <vector>

namespace mrav {

enum class ColumnKind {
  Component,  // one coordinate of a propeller's reduced thrust vector
  Thrust,     // d/du_i
  Alpha,      // d/dalpha_i
  Beta,       // d/dbeta_i
};

struct ColumnTag {
  int propeller = 0;  // index into PlatformSpec::propellers
  ColumnKind kind = ColumnKind::Component;
  int component = 0;  // for Component columns
  bool operator==(const ColumnTag&) const = default;
};

/// 6-row wrench map; rows 0-2 force, rows 3-5 moment. Every column carries
/// the propeller and input it belongs to.
struct AllocationMatrix {
  MatX m;
  std::vector<ColumnTag> cols;

  Eigen::Index num_cols() const { return m.cols(); }
  MatX force() const { return m.topRows(3); }
  MatX moment() const { return m.bottomRows(3); }
};

/// 6x3 block [I; skew(p) + r I] for one propeller.
inline Eigen::Matrix<double, 6, 3> propeller_block(const PropellerSpec& p) {
  Eigen::Matrix<double, 6, 3> b;
  b.topRows<3>() = Mat3::Identity();
  b.bottomRows<3>() = p.moment_map();
  return b;
}

/// Orthonormal basis (3 x c) of the linear span of the thrust vectors a
/// propeller can produce. Dual: I. RadialOnly: the plane swept by alpha.
/// Fixed: the fixed direction.
inline MatX reduction_basis(const PropellerSpec& p) {
  switch (p.tilt.kind) {
    case TiltKind::Dual: return Mat3::Identity();
    case TiltKind::RadialOnly: {
      MatX w(3, 2);
      w.col(0) = thrust_direction(0.0, 0.0, p.gamma);
      w.col(1) = thrust_direction_dalpha(0.0, 0.0, p.gamma);
      return w;
    }
    case TiltKind::Fixed: return p.tilt.direction;
  }
  return Mat3::Identity();
}

inline AllocationMatrix vector_allocation(const PlatformSpec& platform) {
  const auto idx = platform.active();
  AllocationMatrix a;
  a.m.resize(6, 3 * static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    a.m.middleCols<3>(3 * j) = propeller_block(platform.propellers[idx[j]]);
    for (int c = 0; c < 3; ++c) a.cols.push_back({idx[j], ColumnKind::Component, c});
  }
  return a;
}

/// A' : each propeller's block reduced to its tilt capability.
inline AllocationMatrix reduced_allocation(const PlatformSpec& platform) {
  const auto idx = platform.active();
  Eigen::Index ncols = 0;
  for (int i : idx) ncols += platform.propellers[i].tilt.reduced_dim();
  AllocationMatrix a;
  a.m.resize(6, ncols);
  Eigen::Index k = 0;
  for (int i : idx) {
    const auto& p = platform.propellers[i];
    const MatX w = reduction_basis(p);
    a.m.middleCols(k, w.cols()) = propeller_block(p) * w;
    for (int c = 0; c < w.cols(); ++c) a.cols.push_back({i, ColumnKind::Component, c});
    k += w.cols();
  }
  return a;
}

/// dw/du at fixed angles O0 (only the angle fields of `o0` are used).
inline AllocationMatrix fixed_allocation(const PlatformSpec& platform, const ControlInput& o0) {
  check_dimensions(platform, o0);
  const auto idx = platform.active();
  AllocationMatrix a;
  a.m.resize(6, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& p = platform.propellers[idx[j]];
    a.m.col(j) = propeller_block(p) * unit_direction(p, o0.props[j]);
    a.cols.push_back({idx[j], ColumnKind::Thrust, 0});
  }
  return a;
}

/// Analytic Jacobian F = [dw/du  dw/dO] at H0. Column order matches
/// ControlInput::to_vector.
inline AllocationMatrix full_jacobian(const PlatformSpec& platform, const ControlInput& h0) {
  AllocationMatrix a = fixed_allocation(platform, h0);
  const auto idx = platform.active();
  const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
  a.m.conservativeResize(6, platform.dof());
  Eigen::Index k = n;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto& p = platform.propellers[idx[j]];
    const auto& c = h0.props[j];
    const auto block = propeller_block(p);
    if (p.tilt.num_angles() >= 1) {
      const double beta = p.tilt.kind == TiltKind::Dual ? c.beta : 0.0;
      a.m.col(k++) = block * (c.u * thrust_direction_dalpha(c.alpha, beta, p.gamma));
      a.cols.push_back({idx[j], ColumnKind::Alpha, 0});
    }
    if (p.tilt.num_angles() == 2) {
      a.m.col(k++) = block * (c.u * thrust_direction_dbeta(c.alpha, c.beta, p.gamma));
      a.cols.push_back({idx[j], ColumnKind::Beta, 0});
    }
  }
  return a;
}

/// Orthonormal basis of ker(A'_m): the reduced inputs producing zero moment.
inline MatX moment_nullspace(const AllocationMatrix& reduced, double tol_rel = kDefaultRankTol) {
  return nullspace_basis(reduced.moment(), tol_rel);
}

/// Rank of the force reachable at zero moment, rank(A'_f B_m).
inline int hover_force_rank(const AllocationMatrix& reduced, double tol_rel = kDefaultRankTol) {
  const MatX bm = moment_nullspace(reduced, tol_rel);
  if (bm.cols() == 0) return 0;
  return numeric_rank(reduced.force() * bm, tol_rel);
}

}  // namespace mrav
