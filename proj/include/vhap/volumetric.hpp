#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "vhap/geometry.hpp"
#include "vhap/voxmap.hpp"

namespace vhap {

class VoxelizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which implementation of the data-parallel kernels to run. Serial is the
// reference the OpenMP path is tested against; both produce identical bits.
enum class Exec { Serial, Parallel };

struct VoxelizeOptions {
  double voxel_size = 0.005;
  double band_width = 0.0;
  std::size_t cell_budget = std::size_t{1} << 27;
  Exec exec = Exec::Parallel;
};

// Grid covering the mesh bounds padded by band_width + one voxel per side,
// with the padded box centered in the grid.
GridGeometry fit_grid(const Aabb& bounds, double voxel_size, double band_width);

// Surface cells (any triangle touches the closed cube), Interior cells
// (non-surface cells unreachable from the grid boundary by 6-connected
// flood fill) and the Proximity band (outside cells whose center lies
// within band_width of a Surface cell center).
VoxMap voxelize_surface(const TriangleMesh& mesh, const VoxelizeOptions& options);
VoxMap voxelize_surface(const TriangleMesh& mesh, double voxel_size, double band_width);

struct PosedPart {
  TriangleMesh mesh;
  RigidPose pose;
};

// Voxelizes the union of the posed meshes as a single static map. The
// result does not depend on the order of `parts`.
VoxMap cook_voxmaps(const std::vector<PosedPart>& parts, const VoxelizeOptions& options);
VoxMap cook_voxmaps(const std::vector<PosedPart>& parts, double voxel_size, double band_width);

// Point samples of the manipulated part in its local frame. Normals point
// into the body.
struct PointShell {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  double spacing = 0.0;

  std::size_t size() const { return points.size(); }
};

struct PointShellOptions {
  double spacing = 0.005;
  std::size_t point_budget = 1'000'000;
};

PointShell build_pointshell(const TriangleMesh& mesh, const PointShellOptions& options);
PointShell build_pointshell(const TriangleMesh& mesh, double spacing);

}  // namespace vhap
