#pragma once

// Scenes shared by unit and acceptance tests.

#include <cmath>

#include "vhap/volumetric.hpp"
#include "vhap/vps.hpp"

namespace fixture {

using vhap::Vec3;

// A slab whose top face sits strictly inside one layer of cells, probed by
// a flat square grid of points lying in the local z = 0 plane.
struct Wall {
  vhap::VoxMap map;
  vhap::PointShell probe;
  double s = 0.0;
  int top_layer = 0;
  double top_center_z = 0.0;  // z of the Surface layer cell centers
  double top_lo = 0.0;        // lower face of that layer
  double top_hi = 0.0;        // upper face of that layer
};

inline Wall wall(double top_z = 0.0123, double s = 0.005) {
  Wall w;
  w.s = s;
  w.map = vhap::voxelize_surface(vhap::make_box({-0.1, -0.1, -0.05}, {0.1, 0.1, top_z}), s, 2.0 * s);
  const auto& g = w.map.grid();
  w.top_layer = static_cast<int>(std::floor((top_z - g.origin.z()) / s));
  w.top_center_z = g.origin.z() + (w.top_layer + 0.5) * s;
  w.top_lo = g.origin.z() + w.top_layer * s;
  w.top_hi = g.origin.z() + (w.top_layer + 1) * s;
  for (int i = -4; i <= 4; ++i) {
    for (int j = -4; j <= 4; ++j) {
      w.probe.points.emplace_back(0.0047 * i, 0.0047 * j, 0.0);
      w.probe.normals.emplace_back(0.0, 0.0, 1.0);
    }
  }
  w.probe.spacing = 0.0047;
  return w;
}

}  // namespace fixture
