#pragma once

// Simulated dual-arm 6-DOF handle: each arm ends in a three-axis gimbal,
// the handle spans the two gimbal centers and carries a motor about its
// own axis. Forward kinematics goes from the two gimbal frames to the
// handle pose; statics splits a handle wrench into the two arm forces plus
// the motor torque.

#include <stdexcept>

#include "vhap/geometry.hpp"
#include "vhap/vps.hpp"

namespace vhap {

class KinematicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kCoincidentEpsilon = 1e-6;  // m
inline constexpr double kGimbalLockEpsilon = 1e-6;  // on |y3|

struct ArmState {
  Vec3 gimbal_center = Vec3::Zero();
  Mat3 barrel_rotation = Mat3::Identity();
};

struct GimbalAngles {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
};

struct HandleGeometry {
  double length_L = 0.2;  // m, between gimbal centers
  void validate() const;
};

struct DeviceLimits {
  Aabb workspace{Vec3(-0.2, -0.2, -0.3), Vec3(0.2, 0.2, 0.3)};
  double continuous_force = 12.5;   // N
  double peak_force = 30.0;         // N
  double worst_cont_torque = 1.0;   // N m
  double worst_peak_torque = 2.5;   // N m
  double typ_cont_torque = 1.8;     // N m
  double typ_peak_torque = 10.0;    // N m
  double stiffness_min = 14000.0;   // N/m
  double stiffness_max = 18000.0;   // N/m
  double resolution = 1e-4;         // m
  double angular_resolution = 0.005;  // rad
  double angular_workspace = 12.0;  // as specified by the vendor; not enforced

  void validate() const;
};

struct ArmForces {
  Vec3 f_right = Vec3::Zero();
  Vec3 f_left = Vec3::Zero();
  double handle_motor_torque = 0.0;  // about the handle Y axis
};

Vec3 handle_position(const ArmState& right, const ArmState& left);
// Unit vector from the left to the right gimbal center.
Vec3 handle_y_axis(const ArmState& right, const ArmState& left);

// Orientation of the handle in the barrel frame:
//   [ c1 s2 c3 - s1 s3   -c1 c2   c1 s2 s3 + s1 c3 ]
//   [ s1 s2 c3 + c1 s3   -s1 c2   s1 s2 s3 - c1 c3 ]
//   [ c2 c3               s2      c2 s3            ]
Mat3 gimbal_rotation(const GimbalAngles& q);

// Inverse of the middle column of gimbal_rotation on the c2 > 0 branch.
GimbalAngles gimbal_angles_from_y(const Vec3& y_in_barrel, double q3);

// The left arm's barrel frame is the reference frame of the gimbal angles.
RigidPose forward_handle_pose(const ArmState& right, const ArmState& left, double q3);

struct TorqueSplit {
  Vec3 parallel = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
};
TorqueSplit decompose_torque(const Vec3& c, const Vec3& y);

// World-frame handle force and torque to arm forces. The right gimbal sits
// at +(L/2) y from the handle center, so the couple is f_c = (c_n x y) / L.
ArmForces arm_forces(const Vec3& f_ee, const Vec3& c_ee, const Vec3& y, const HandleGeometry& geom);

struct SaturatedCommand {
  ArmForces forces;
  Wrench wrench;
  bool force_clamped = false;
  bool torque_clamped = false;
};

// Clamps force to peak_force and torque to typ_peak_torque preserving
// direction, then recomputes the arm forces from the clamped wrench.
SaturatedCommand saturate(const ArmForces& forces, const Wrench& wrench_at_handle, const Vec3& y,
                          const HandleGeometry& geom, const DeviceLimits& limits);

struct DeviceReading {
  ArmState right;
  ArmState left;
  double q3 = 0.0;
  RigidPose handle_pose;  // recomputed through forward kinematics
};

// Produces arm states for a scripted handle pose by placing the gimbals at
// p +- (L/2) y, and applies handle wrenches through statics and limits.
class SimulatedDevice {
 public:
  explicit SimulatedDevice(HandleGeometry geom = {}, DeviceLimits limits = {},
                           GimbalAngles reference = {0.3, 0.2, 0.1});

  DeviceReading sense(const RigidPose& handle) const;
  SaturatedCommand actuate(const Wrench& wrench, const RigidPose& handle) const;
  bool in_workspace(const Vec3& p) const { return limits_.workspace.contains(p); }

  const HandleGeometry& geometry() const { return geom_; }
  const DeviceLimits& limits() const { return limits_; }

 private:
  HandleGeometry geom_;
  DeviceLimits limits_;
  GimbalAngles reference_;
  Mat3 reference_rotation_;
};

}  // namespace vhap
