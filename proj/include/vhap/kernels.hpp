#pragma once

// Data-parallel kernels behind the volumetric builders and contact
// detection. Every kernel has a plain serial version and an OpenMP version;
// the two must agree bit for bit, which the unit tests and the kernel
// benchmark rely on.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vhap/geometry.hpp"
#include "vhap/voxmap.hpp"

namespace vhap::kernels {

// Closed triangle / closed axis-aligned box overlap (separating axis test).
bool triangle_box_overlap(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& lo, const Vec3& hi);

// Triangle processing order that depends only on triangle geometry, so
// per-cell accumulation is independent of how the mesh was assembled.
struct CanonicalTriangles {
  std::vector<std::uint32_t> order;  // triangle indices, canonical order
  std::vector<Vec3> area_vectors;    // indexed by rank: 0.5 (b - a) x (c - a)
};
CanonicalTriangles canonicalize(const TriangleMesh& mesh);

struct SurfaceCells {
  std::vector<std::size_t> cells;  // ascending linear indices
  std::vector<Vec3> normals;       // unit, parallel to `cells`
};

SurfaceCells mark_surface_serial(const TriangleMesh& mesh, const GridGeometry& grid);
SurfaceCells mark_surface_parallel(const TriangleMesh& mesh, const GridGeometry& grid);

// Squared distance, in voxel units, from every cell center to the nearest
// surface cell center. Values above radius^2 are reported as radius^2 + 1.
std::vector<std::int64_t> band_distance_sq_serial(const GridGeometry& grid, const std::vector<std::uint8_t>& surface,
                                                  int radius);
std::vector<std::int64_t> band_distance_sq_parallel(const GridGeometry& grid,
                                                    const std::vector<std::uint8_t>& surface, int radius);

}  // namespace vhap::kernels
