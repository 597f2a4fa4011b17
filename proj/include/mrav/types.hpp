#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mrav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Malformed input: bad config text, dimension mismatch, unknown option.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A domain invariant does not hold. The message names the invariant.
class InvariantError : public std::runtime_error {
 public:
  InvariantError(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// Simulation state became non-finite.
class SimulationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

inline Mat3 skew(const Vec3& p) {
  Mat3 s;
  s << 0.0, -p.z(), p.y(),
       p.z(), 0.0, -p.x(),
       -p.y(), p.x(), 0.0;
  return s;
}

inline Mat3 rot_x(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
}
inline Mat3 rot_y(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}
inline Mat3 rot_z(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

/// Hover orientation parametrized by a rotation about x_B (phi) followed by
/// a rotation about the new y_B (theta).
inline Mat3 orientation_from_phi_theta(double phi, double theta) {
  return rot_x(phi) * rot_y(theta);
}

inline bool is_rotation(const Mat3& r, double tol = 1e-10) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

/// Rotation R with R^T e3 = dir, i.e. the body-frame direction `dir` is
/// carried onto world z. Uses the shortest arc.
inline Mat3 rotation_aligning_to_world_z(const Vec3& dir) {
  const Vec3 d = dir.normalized();
  // R^T e3 = d  <=>  R d = e3
  Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(d, Vec3::UnitZ());
  return q.toRotationMatrix();
}

/// exp map so(3) -> SO(3).
inline Mat3 exp_so3(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-300) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

/// Project a near-rotation back onto SO(3).
inline Mat3 orthonormalize(const Mat3& r) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0) u.col(2) *= -1.0;
  return u * v.transpose();
}

}  // namespace mrav
