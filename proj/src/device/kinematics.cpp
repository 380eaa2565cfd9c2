#include <cmath>

#include "vhap/device.hpp"

namespace vhap {

Vec3 handle_position(const ArmState& right, const ArmState& left) {
  return 0.5 * (right.gimbal_center + left.gimbal_center);
}

Vec3 handle_y_axis(const ArmState& right, const ArmState& left) {
  const Vec3 d = right.gimbal_center - left.gimbal_center;
  const double n = d.norm();
  if (!(n > kCoincidentEpsilon)) throw KinematicsError("gimbal centers coincide");
  return d / n;
}

Mat3 gimbal_rotation(const GimbalAngles& q) {
  const double c1 = std::cos(q.q1), s1 = std::sin(q.q1);
  const double c2 = std::cos(q.q2), s2 = std::sin(q.q2);
  const double c3 = std::cos(q.q3), s3 = std::sin(q.q3);
  Mat3 r;
  r << c1 * s2 * c3 - s1 * s3, -c1 * c2, c1 * s2 * s3 + s1 * c3,
       s1 * s2 * c3 + c1 * s3, -s1 * c2, s1 * s2 * s3 - c1 * c3,
       c2 * c3, s2, c2 * s3;
  return r;
}

GimbalAngles gimbal_angles_from_y(const Vec3& y, double q3) {
  if (!(std::abs(y.z()) < 1.0 - kGimbalLockEpsilon)) throw KinematicsError("gimbal lock: handle axis along barrel axis");
  GimbalAngles q;
  q.q2 = std::asin(y.z());
  q.q1 = std::atan2(-y.y(), -y.x());
  q.q3 = q3;
  return q;
}

RigidPose forward_handle_pose(const ArmState& right, const ArmState& left, double q3) {
  const Vec3 y0 = handle_y_axis(right, left);
  const Mat3& r3 = left.barrel_rotation;
  if (!is_proper_rotation(r3)) throw KinematicsError("barrel rotation is not a proper rotation");
  const Vec3 y3 = r3.transpose() * y0;
  const auto q = gimbal_angles_from_y(y3, q3);
  return RigidPose(r3 * gimbal_rotation(q), handle_position(right, left));
}

}  // namespace vhap
