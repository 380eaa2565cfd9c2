#include <algorithm>
#include <stdexcept>

#include "vhap/harness.hpp"

namespace vhap {

Trajectory::Trajectory(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.size() < 2) throw std::invalid_argument("trajectory needs at least two waypoints");
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    if (!(waypoints_[i].t > waypoints_[i - 1].t)) throw std::invalid_argument("waypoint times must increase");
  }
}

RigidPose Trajectory::sample(double t) const {
  if (!(t > waypoints_.front().t)) return waypoints_.front().pose;
  if (!(t < waypoints_.back().t)) return waypoints_.back().pose;
  const auto it = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                                   [](double v, const Waypoint& w) { return v < w.t; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  const Vec3 p = (1.0 - u) * a.pose.position() + u * b.pose.position();
  const Quat q = a.pose.quaternion().slerp(u, b.pose.quaternion());
  return RigidPose::from_quaternion(q, p);
}

}  // namespace vhap
