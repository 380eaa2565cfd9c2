#pragma once

// Independent reference computations used only by tests. They share no
// code with the library beyond the basic vector types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vhap/geometry.hpp"
#include "vhap/voxmap.hpp"

namespace oracle {

using vhap::Vec3;

// Closed triangle vs closed box by clipping the triangle polygon against
// the six slabs. Intersection points are snapped onto the clipping plane,
// so a triangle lying exactly on a face is kept.
inline bool clip_triangle_box(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& lo, const Vec3& hi) {
  for (int axis = 0; axis < 3; ++axis) {
    const double tmin = std::min({a[axis], b[axis], c[axis]});
    const double tmax = std::max({a[axis], b[axis], c[axis]});
    if (tmax < lo[axis] || tmin > hi[axis]) return false;
  }
  std::vector<Vec3> poly{a, b, c};
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double plane = side == 0 ? lo[axis] : hi[axis];
      auto inside = [&](const Vec3& p) { return side == 0 ? p[axis] >= plane : p[axis] <= plane; };
      std::vector<Vec3> out;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3& p = poly[i];
        const Vec3& q = poly[(i + 1) % poly.size()];
        const bool pin = inside(p);
        const bool qin = inside(q);
        if (pin) out.push_back(p);
        if (pin != qin) {
          const double t = (plane - p[axis]) / (q[axis] - p[axis]);
          Vec3 x = p + t * (q - p);
          x[axis] = plane;
          out.push_back(x);
        }
      }
      poly = std::move(out);
      if (poly.empty()) return false;
    }
  }
  return true;
}

// Every cell whose closed cube touches some triangle, by exhaustive search.
inline std::vector<std::size_t> surface_cells(const vhap::TriangleMesh& mesh, const vhap::GridGeometry& g) {
  std::vector<std::uint8_t> hit(g.cell_count(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto c = mesh.corners(t);
    for (int k = 0; k < g.dims[2]; ++k) {
      for (int j = 0; j < g.dims[1]; ++j) {
        for (int i = 0; i < g.dims[0]; ++i) {
          const auto idx = g.linear_index(i, j, k);
          if (hit[idx]) continue;
          if (clip_triangle_box(c[0], c[1], c[2], g.cell_min(i, j, k), g.cell_max(i, j, k))) hit[idx] = 1;
        }
      }
    }
  }
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < hit.size(); ++i) {
    if (hit[i]) cells.push_back(i);
  }
  return cells;
}

// Closest point on triangle (a, b, c) to p, by Voronoi-region case analysis.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

inline double distance_to_mesh(const Vec3& p, const vhap::TriangleMesh& mesh) {
  double best = INFINITY;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto c = mesh.corners(t);
    best = std::min(best, (p - closest_point_on_triangle(p, c[0], c[1], c[2])).norm());
  }
  return best;
}

// Hand-rolled generators on a fixed-seed engine.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  Vec3 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Vec3 unit() {
    for (;;) {
      const Vec3 v = vec(-1.0, 1.0);
      const double n = v.norm();
      if (n > 1e-3 && n <= 1.0) return v / n;
    }
  }
  vhap::Quat quat() {
    const double u1 = uniform(0, 1), u2 = uniform(0, 2 * M_PI), u3 = uniform(0, 2 * M_PI);
    const double s1 = std::sqrt(1 - u1), s2 = std::sqrt(u1);
    return vhap::Quat(s1 * std::sin(u2), s1 * std::cos(u2), s2 * std::sin(u3), s2 * std::cos(u3)).normalized();
  }
  vhap::RigidPose pose(double extent) { return vhap::RigidPose::from_quaternion(quat(), vec(-extent, extent)); }
};

}  // namespace oracle
