#pragma once

#include "mrav/types.hpp"

namespace mrav {

inline constexpr double kDefaultRankTol = 1e-9;

/// Count of singular values above tol_rel * sigma_max. Zero for an empty or
/// all-zero matrix.
inline int numeric_rank(const MatX& m, double tol_rel = kDefaultRankTol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatX> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol_rel * s[0]) ++r;
  return r;
}

/// Orthonormal basis of ker(m), with the same singular-value cut as
/// numeric_rank. May have zero columns.
inline MatX nullspace_basis(const MatX& m, double tol_rel = kDefaultRankTol) {
  const auto n = m.cols();
  if (m.rows() == 0) return MatX::Identity(n, n);
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeFullV);
  const int r = numeric_rank(m, tol_rel);
  return svd.matrixV().rightCols(n - r);
}

/// Moore-Penrose pseudo-inverse with the numeric_rank cut.
inline MatX pseudo_inverse(const MatX& m, double tol_rel = kDefaultRankTol) {
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  VecX inv = VecX::Zero(s.size());
  if (s.size() > 0 && s[0] > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > tol_rel * s[0]) inv[i] = 1.0 / s[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// F^T (F F^T + lambda^2 I)^-1
inline MatX damped_pseudo_inverse(const MatX& f, double lambda) {
  const MatX g = f * f.transpose() + lambda * lambda * MatX::Identity(f.rows(), f.rows());
  return f.transpose() * g.ldlt().solve(MatX::Identity(f.rows(), f.rows()));
}

}  // namespace mrav
