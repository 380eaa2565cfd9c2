#include <cmath>
#include <stdexcept>

#include "vhap/geometry.hpp"

namespace vhap {

bool is_proper_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 err = r.transpose() * r - Mat3::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

RigidPose::RigidPose(const Mat3& rotation, const Vec3& position)
    : rotation_(rotation), position_(position) {
  if (!is_proper_rotation(rotation)) throw std::invalid_argument("RigidPose: rotation is not proper");
  if (!position.allFinite()) throw std::invalid_argument("RigidPose: position is not finite");
}

RigidPose RigidPose::translation(const Vec3& p) { return RigidPose(Mat3::Identity(), p); }

RigidPose RigidPose::from_quaternion(const Quat& q, const Vec3& p) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("RigidPose: degenerate quaternion");
  return RigidPose(q.normalized().toRotationMatrix(), p);
}

RigidPose RigidPose::from_axis_angle(const Vec3& axis, double angle, const Vec3& p) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::invalid_argument("RigidPose: zero rotation axis");
  return RigidPose(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix(), p);
}

Quat RigidPose::quaternion() const {
  Quat q(rotation_);
  q.normalize();
  // Canonical hemisphere keeps the wire representation unique.
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

RigidPose RigidPose::compose(const RigidPose& b) const {
  return RigidPose(Unchecked{}, rotation_ * b.rotation_, rotation_ * b.position_ + position_);
}

RigidPose RigidPose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return RigidPose(Unchecked{}, rt, -(rt * position_));
}

Vec3 rotation_vector(const Mat3& r) {
  Eigen::AngleAxisd aa(r);
  return aa.axis() * aa.angle();
}

Vec3 relative_rotation_vector(const Mat3& from, const Mat3& to) {
  if (from == to) return Vec3::Zero();
  return rotation_vector(to * from.transpose());
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  return Eigen::AngleAxisd(a.transpose() * b).angle();
}

}  // namespace vhap
