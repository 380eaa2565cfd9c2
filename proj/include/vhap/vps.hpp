#pragma once

// Voxmap-pointshell haptic rendering: contact detection by voxel index
// lookup, penalty forces from penetration depth, wrench accumulation and a
// 6-DOF virtual coupling between the tracked device and the simulated tool.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vhap/geometry.hpp"
#include "vhap/volumetric.hpp"
#include "vhap/voxmap.hpp"

namespace vhap {

struct Contact {
  std::size_t point_index = 0;
  Vec3 world_point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // voxel surface normal, pointing out of the static part
  double depth = 0.0;           // in [0, voxel_size]
};

struct ContactSet {
  std::vector<Contact> contacts;
  bool deep_penetration = false;
  std::size_t lookup_count = 0;

  void clear() {
    contacts.clear();
    deep_penetration = false;
    lookup_count = 0;
  }
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  Vec3 reference_point = Vec3::Zero();

  static Wrench zero_at(const Vec3& ref) { return {Vec3::Zero(), Vec3::Zero(), ref}; }
  bool is_zero() const { return force.isZero(0.0) && torque.isZero(0.0); }
};

// Half-open cell lookup; points outside the grid are Empty.
VoxelState voxel_lookup(const VoxMap& map, const Vec3& world_point);

// Clears `out` and fills it; allocation-free once `out` has capacity for
// every shell point.
void detect_contacts(const PointShell& shell, const RigidPose& tool_pose, const VoxMap& map, ContactSet& out);
ContactSet detect_contacts(const PointShell& shell, const RigidPose& tool_pose, const VoxMap& map);

// OpenMP version of detect_contacts with the same output order.
void detect_contacts_parallel(const PointShell& shell, const RigidPose& tool_pose, const VoxMap& map,
                              ContactSet& out);

// Penalty force k * depth * normal; torque about `reference`.
Wrench contact_force(const Contact& contact, double k_penalty, const Vec3& reference);
Wrench total_wrench(std::span<const Contact> contacts, const Vec3& reference, double k_penalty);

struct CouplingConfig {
  double k_lin = 14000.0;   // N/m
  double d_lin = 0.0;       // N s/m
  double k_ang = 10.0;      // N m/rad
  double d_ang = 0.0;       // N m s/rad
  double max_force = 30.0;  // N
  double max_torque = 10.0; // N m
  double dt = 1.0 / 1600.0; // s
  double tool_mass = 0.2;       // kg
  double tool_inertia = 2.0e-4; // kg m^2, isotropic

  // Gains anchored to the device characteristics, critically damped for
  // the virtual tool body.
  static CouplingConfig defaults();
  void validate() const;
};

struct RenderConfig {
  CouplingConfig coupling = CouplingConfig::defaults();
  double k_penalty = 1.0e4;  // N/m per contact point
  // Contact stiffness applied to the proxy is scaled down so that
  // K_eff * dt^2 / mass stays below this bound (explicit integrator limit).
  double stability_bound = 1.0;
};

struct ToolState {
  RigidPose pose;                        // simulated tool (proxy)
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();  // world frame
  RigidPose device_pose;                 // tracked handle
  Vec3 device_velocity = Vec3::Zero();
  Vec3 device_angular_velocity = Vec3::Zero();
  Wrench last_wrench;                    // contact wrench of the last step
  RigidPose last_valid_pose;             // last proxy pose without deep penetration
  bool in_contact = false;

  static ToolState at_rest(const RigidPose& pose);
};

struct CouplingResult {
  ToolState state;
  Wrench device_wrench;
};

// Spring-damper between device and tool. The returned device wrench is the
// force/torque the coupling applies to the handle (pulling it toward the
// tool), clamped to (max_force, max_torque). The tool receives the opposite
// coupling wrench plus `contact_wrench` and advances one semi-implicit
// Euler step.
CouplingResult coupling_step(const ToolState& state, const CouplingConfig& cfg, const Wrench& contact_wrench);

// Wrench the coupling applies to the handle, before clamping.
Wrench coupling_wrench(const ToolState& state, const CouplingConfig& cfg);

Wrench clamp_wrench(const Wrench& w, double max_force, double max_torque);

struct StepStats {
  std::size_t contact_count = 0;
  bool deep_penetration = false;
  std::int64_t step_time_ns = 0;
  std::size_t lookup_count = 0;
  double contact_scale = 1.0;
};

struct RenderStepResult {
  ToolState state;
  Wrench device_wrench;
  StepStats stats;
};

// One haptic frame: detect_contacts -> total_wrench -> coupling_step.
// The device wrench is displayed only while the tool is in contact (some
// shell point lies in a Surface cell, or deep penetration); in free space
// it is exactly zero. Deep penetration freezes the proxy at its last valid
// pose. The contact wrench applied to the proxy is scaled by
// stats.contact_scale; state.last_wrench keeps the unscaled sum.
RenderStepResult render_step(const ToolState& state, const PointShell& shell, const VoxMap& map,
                             const RenderConfig& cfg, const RigidPose& device_pose, ContactSet& scratch);

// Owns the per-loop scratch buffers so steady-state steps do not allocate.
class RenderLoop {
 public:
  RenderLoop(const PointShell& shell, const VoxMap& map, const RenderConfig& cfg, const ToolState& initial);

  RenderStepResult step(const RigidPose& device_pose);
  const ToolState& state() const { return state_; }
  const ContactSet& contacts() const { return scratch_; }
  const RenderConfig& config() const { return cfg_; }

 private:
  const PointShell& shell_;
  const VoxMap& map_;
  RenderConfig cfg_;
  ToolState state_;
  ContactSet scratch_;
};

}  // namespace vhap
