#include <cmath>

#include "vhap/device.hpp"

namespace vhap {

SimulatedDevice::SimulatedDevice(HandleGeometry geom, DeviceLimits limits, GimbalAngles reference)
    : geom_(geom), limits_(limits), reference_(reference), reference_rotation_(gimbal_rotation(reference)) {
  geom_.validate();
  limits_.validate();
  if (!(std::abs(gimbal_rotation(reference).col(1).z()) < 1.0 - kGimbalLockEpsilon))
    throw KinematicsError("reference gimbal angles are at gimbal lock");
}

DeviceReading SimulatedDevice::sense(const RigidPose& handle) const {
  const Mat3& r = handle.rotation();
  const Vec3 y = r.col(1);
  const Vec3 half = 0.5 * geom_.length_L * y;
  // Barrel frame chosen so the gimbals sit at the reference angles.
  const Mat3 barrel = r * reference_rotation_.transpose();

  DeviceReading d;
  d.right.gimbal_center = handle.position() + half;
  d.left.gimbal_center = handle.position() - half;
  d.right.barrel_rotation = barrel;
  d.left.barrel_rotation = barrel;
  d.q3 = reference_.q3;
  d.handle_pose = forward_handle_pose(d.right, d.left, d.q3);
  return d;
}

SaturatedCommand SimulatedDevice::actuate(const Wrench& wrench, const RigidPose& handle) const {
  const Vec3 y = handle.rotation().col(1);
  const auto raw = arm_forces(wrench.force, wrench.torque, y, geom_);
  return saturate(raw, wrench, y, geom_, limits_);
}

}  // namespace vhap
