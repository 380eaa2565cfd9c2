#include <cmath>
#include <stdexcept>

#include "vhap/vps.hpp"

namespace vhap {

CouplingConfig CouplingConfig::defaults() {
  CouplingConfig c;
  c.d_lin = 2.0 * std::sqrt(c.k_lin * c.tool_mass);
  c.d_ang = 2.0 * std::sqrt(c.k_ang * c.tool_inertia);
  return c;
}

void CouplingConfig::validate() const {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!nonneg(k_lin) || !nonneg(d_lin) || !nonneg(k_ang) || !nonneg(d_ang))
    throw std::invalid_argument("coupling gains must be finite and >= 0");
  if (!pos(dt)) throw std::invalid_argument("coupling dt must be > 0");
  if (!pos(max_force) || !pos(max_torque)) throw std::invalid_argument("coupling caps must be > 0");
  if (!pos(tool_mass) || !pos(tool_inertia)) throw std::invalid_argument("tool mass and inertia must be > 0");
}

ToolState ToolState::at_rest(const RigidPose& pose) {
  ToolState s;
  s.pose = pose;
  s.device_pose = pose;
  s.last_valid_pose = pose;
  s.last_wrench = Wrench::zero_at(pose.position());
  return s;
}

Wrench clamp_wrench(const Wrench& w, double max_force, double max_torque) {
  Wrench out = w;
  const double f = w.force.norm();
  if (f > max_force) out.force = w.force * (max_force / f);
  const double t = w.torque.norm();
  if (t > max_torque) out.torque = w.torque * (max_torque / t);
  return out;
}

Wrench coupling_wrench(const ToolState& state, const CouplingConfig& cfg) {
  const Vec3 dx = state.device_pose.position() - state.pose.position();
  const Vec3 dv = state.device_velocity - state.velocity;
  const Vec3 dtheta = relative_rotation_vector(state.pose.rotation(), state.device_pose.rotation());
  const Vec3 dw = state.device_angular_velocity - state.angular_velocity;
  // The spring pulls the tool toward the handle; the handle feels the reaction.
  Wrench w;
  w.reference_point = state.device_pose.position();
  w.force = -(cfg.k_lin * dx + cfg.d_lin * dv);
  w.torque = -(cfg.k_ang * dtheta + cfg.d_ang * dw);
  return w;
}

CouplingResult coupling_step(const ToolState& state, const CouplingConfig& cfg, const Wrench& contact_wrench) {
  CouplingResult r;
  const Wrench on_device = coupling_wrench(state, cfg);
  r.device_wrench = clamp_wrench(on_device, cfg.max_force, cfg.max_torque);

  ToolState next = state;
  const Vec3 force = contact_wrench.force - on_device.force;
  const Vec3 torque = contact_wrench.torque - on_device.torque;
  next.velocity = state.velocity + (cfg.dt / cfg.tool_mass) * force;
  next.angular_velocity = state.angular_velocity + (cfg.dt / cfg.tool_inertia) * torque;

  const Vec3 position = state.pose.position() + cfg.dt * next.velocity;
  const double angle = next.angular_velocity.norm() * cfg.dt;
  if (angle > 0.0) {
    const Quat dq(Eigen::AngleAxisd(angle, next.angular_velocity.normalized()));
    next.pose = RigidPose::from_quaternion((dq * state.pose.quaternion()).normalized(), position);
  } else {
    next.pose = RigidPose(state.pose.rotation(), position);
  }
  next.last_wrench = contact_wrench;
  r.state = next;
  return r;
}

}  // namespace vhap
