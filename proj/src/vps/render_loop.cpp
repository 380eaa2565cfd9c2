#include <algorithm>
#include <chrono>

#include "vhap/vps.hpp"

namespace vhap {

namespace {

// Largest factor on the contact stiffness that keeps the explicit update
// of the proxy inside the stability bound for both translation and rotation.
double contact_scale(const ContactSet& set, const Vec3& reference, const RenderConfig& cfg) {
  std::size_t active = 0;
  double lever_sq = 0.0;
  for (const auto& c : set.contacts) {
    if (!(c.depth > 0.0)) continue;
    ++active;
    lever_sq += (c.world_point - reference).squaredNorm();
  }
  if (active == 0) return 1.0;
  const auto& cc = cfg.coupling;
  const double dt2 = cc.dt * cc.dt;
  double scale = 1.0;
  const double k_lin = cfg.k_penalty * static_cast<double>(active);
  scale = std::min(scale, cfg.stability_bound * cc.tool_mass / (k_lin * dt2));
  const double k_ang = cfg.k_penalty * lever_sq;
  if (k_ang > 0.0) scale = std::min(scale, cfg.stability_bound * cc.tool_inertia / (k_ang * dt2));
  return scale;
}

}  // namespace

RenderStepResult render_step(const ToolState& state, const PointShell& shell, const VoxMap& map,
                             const RenderConfig& cfg, const RigidPose& device_pose, ContactSet& scratch) {
  const auto t0 = std::chrono::steady_clock::now();
  const double dt = cfg.coupling.dt;

  ToolState s = state;
  s.device_velocity = (device_pose.position() - state.device_pose.position()) / dt;
  s.device_angular_velocity =
      relative_rotation_vector(state.device_pose.rotation(), device_pose.rotation()) / dt;
  s.device_pose = device_pose;

  detect_contacts(shell, s.pose, map, scratch);

  RenderStepResult out;
  out.stats.contact_count = scratch.contacts.size();
  out.stats.deep_penetration = scratch.deep_penetration;
  out.stats.lookup_count = scratch.lookup_count;

  Wrench device_wrench;
  if (scratch.deep_penetration) {
    s.pose = s.last_valid_pose;
    s.velocity = Vec3::Zero();
    s.angular_velocity = Vec3::Zero();
    s.last_wrench = Wrench::zero_at(s.pose.position());
    device_wrench = clamp_wrench(coupling_wrench(s, cfg.coupling), cfg.coupling.max_force, cfg.coupling.max_torque);
    out.state = s;
  } else {
    s.last_valid_pose = s.pose;
    const Vec3 ref = s.pose.position();
    const Wrench contact = total_wrench(scratch.contacts, ref, cfg.k_penalty);
    const double scale = contact_scale(scratch, ref, cfg);
    Wrench applied = contact;
    applied.force *= scale;
    applied.torque *= scale;
    auto r = coupling_step(s, cfg.coupling, applied);
    r.state.last_wrench = contact;
    out.state = r.state;
    device_wrench = r.device_wrench;
    out.stats.contact_scale = scale;
  }

  // Free-space motion is displayed as zero force.
  out.state.in_contact = out.stats.contact_count > 0 || out.stats.deep_penetration;
  out.device_wrench = out.state.in_contact ? device_wrench : Wrench::zero_at(device_pose.position());

  out.stats.step_time_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RenderLoop::RenderLoop(const PointShell& shell, const VoxMap& map, const RenderConfig& cfg, const ToolState& initial)
    : shell_(shell), map_(map), cfg_(cfg), state_(initial) {
  cfg_.coupling.validate();
  scratch_.contacts.reserve(shell.size());
}

RenderStepResult RenderLoop::step(const RigidPose& device_pose) {
  auto r = render_step(state_, shell_, map_, cfg_, device_pose, scratch_);
  state_ = r.state;
  return r;
}

}  // namespace vhap
