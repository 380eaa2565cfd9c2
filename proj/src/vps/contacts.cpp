#include <algorithm>

#include <omp.h>

#include "vhap/vps.hpp"

namespace vhap {

VoxelState voxel_lookup(const VoxMap& map, const Vec3& world_point) {
  if (map.cell_count() == 0) return VoxelState::empty();
  const auto cell = map.grid().locate(world_point);
  if (!cell) return VoxelState::empty();
  return map.state((*cell)[0], (*cell)[1], (*cell)[2]);
}

namespace {

// Classifies one shell point. Returns false for free space; sets `deep`
// for interior hits and fills `c` for surface hits.
inline bool probe(const VoxMap& map, const Mat3& rot, const Vec3& trans, const Vec3& local, std::size_t index,
                  Contact& c, bool& deep) {
  const Vec3 p = rot * local + trans;
  const auto& g = map.grid();
  const auto cell = g.locate(p);
  if (!cell) return false;
  const auto [i, j, k] = *cell;
  const auto w = map.word(g.linear_index(i, j, k));
  const auto tag = VoxMap::word_tag(w);
  if (tag == VoxelTag::Interior) {
    deep = true;
    return false;
  }
  if (tag != VoxelTag::Surface) return false;
  const Vec3& n = map.word_normal(w);
  const double below = -n.dot(p - g.cell_center(i, j, k));
  c.point_index = index;
  c.world_point = p;
  c.normal = n;
  c.depth = std::clamp(below, 0.0, g.voxel_size);
  return true;
}

}  // namespace

void detect_contacts(const PointShell& shell, const RigidPose& tool_pose, const VoxMap& map, ContactSet& out) {
  out.clear();
  if (map.cell_count() == 0) {
    out.lookup_count = shell.size();
    return;
  }
  const Mat3& rot = tool_pose.rotation();
  const Vec3& trans = tool_pose.position();
  Contact c;
  bool deep = false;
  for (std::size_t i = 0; i < shell.points.size(); ++i) {
    if (probe(map, rot, trans, shell.points[i], i, c, deep)) out.contacts.push_back(c);
  }
  out.deep_penetration = deep;
  out.lookup_count = shell.size();
}

ContactSet detect_contacts(const PointShell& shell, const RigidPose& tool_pose, const VoxMap& map) {
  ContactSet out;
  out.contacts.reserve(shell.size());
  detect_contacts(shell, tool_pose, map, out);
  return out;
}

void detect_contacts_parallel(const PointShell& shell, const RigidPose& tool_pose, const VoxMap& map,
                              ContactSet& out) {
  out.clear();
  const auto n = static_cast<std::int64_t>(shell.size());
  if (map.cell_count() == 0) {
    out.lookup_count = shell.size();
    return;
  }
  const Mat3& rot = tool_pose.rotation();
  const Vec3& trans = tool_pose.position();

  std::vector<Contact> slots(shell.size());
  std::vector<std::uint8_t> hit(shell.size(), 0);
  bool deep = false;
#pragma omp parallel for schedule(static) reduction(|| : deep)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    bool d = false;
    hit[u] = probe(map, rot, trans, shell.points[u], u, slots[u], d) ? 1 : 0;
    deep = deep || d;
  }
  for (std::size_t i = 0; i < shell.size(); ++i) {
    if (hit[i]) out.contacts.push_back(slots[i]);
  }
  out.deep_penetration = deep;
  out.lookup_count = shell.size();
}

Wrench contact_force(const Contact& contact, double k_penalty, const Vec3& reference) {
  Wrench w;
  w.reference_point = reference;
  w.force = (k_penalty * contact.depth) * contact.normal;
  w.torque = (contact.world_point - reference).cross(w.force);
  return w;
}

Wrench total_wrench(std::span<const Contact> contacts, const Vec3& reference, double k_penalty) {
  Wrench sum = Wrench::zero_at(reference);
  for (const auto& c : contacts) {
    const Wrench w = contact_force(c, k_penalty, reference);
    sum.force += w.force;
    sum.torque += w.torque;
  }
  return sum;
}

}  // namespace vhap
