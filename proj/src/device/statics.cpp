#include <cmath>
#include <stdexcept>

#include "vhap/device.hpp"

namespace vhap {

void HandleGeometry::validate() const {
  if (!(length_L > 0.0) || !std::isfinite(length_L)) throw std::invalid_argument("handle length must be > 0");
}

void DeviceLimits::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(continuous_force) || !pos(peak_force) || !pos(worst_cont_torque) || !pos(worst_peak_torque) ||
      !pos(typ_cont_torque) || !pos(typ_peak_torque) || !pos(stiffness_min) || !pos(stiffness_max) ||
      !pos(resolution) || !pos(angular_resolution))
    throw std::invalid_argument("device limits must be positive");
  if (continuous_force > peak_force || worst_cont_torque > worst_peak_torque || typ_cont_torque > typ_peak_torque ||
      stiffness_min > stiffness_max)
    throw std::invalid_argument("continuous limits must not exceed peak limits");
  if (!((workspace.max.array() > workspace.min.array()).all())) throw std::invalid_argument("empty device workspace");
}

TorqueSplit decompose_torque(const Vec3& c, const Vec3& y) {
  TorqueSplit s;
  s.parallel = c.dot(y) * y;
  s.normal = c - s.parallel;
  return s;
}

ArmForces arm_forces(const Vec3& f_ee, const Vec3& c_ee, const Vec3& y, const HandleGeometry& geom) {
  const auto split = decompose_torque(c_ee, y);
  const Vec3 half = 0.5 * f_ee;
  const Vec3 couple = split.normal.cross(y) / geom.length_L;
  ArmForces a;
  a.f_right = half + couple;
  a.f_left = half - couple;
  a.handle_motor_torque = c_ee.dot(y);
  return a;
}

SaturatedCommand saturate(const ArmForces& forces, const Wrench& wrench_at_handle, const Vec3& y,
                          const HandleGeometry& geom, const DeviceLimits& limits) {
  SaturatedCommand out;
  out.wrench = clamp_wrench(wrench_at_handle, limits.peak_force, limits.typ_peak_torque);
  out.force_clamped = wrench_at_handle.force.norm() > limits.peak_force;
  out.torque_clamped = wrench_at_handle.torque.norm() > limits.typ_peak_torque;
  out.forces = (out.force_clamped || out.torque_clamped)
                   ? arm_forces(out.wrench.force, out.wrench.torque, y, geom)
                   : forces;
  return out;
}

}  // namespace vhap
