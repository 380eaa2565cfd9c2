#include <cmath>
#include <string>

#include "vhap/kernels.hpp"
#include "vhap/volumetric.hpp"

namespace vhap {

namespace {

void check_voxel_args(double voxel_size, double band_width) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) throw VoxelizeError("voxel_size must be positive");
  if (!(band_width >= 0.0) || !std::isfinite(band_width)) throw VoxelizeError("band_width must be >= 0");
}

// Marks every non-surface cell 6-connected to the grid boundary.
std::vector<std::uint8_t> flood_outside(const GridGeometry& g, const std::vector<std::uint8_t>& surface) {
  std::vector<std::uint8_t> outside(g.cell_count(), 0);
  std::vector<std::size_t> stack;
  auto seed = [&](int i, int j, int k) {
    const auto idx = g.linear_index(i, j, k);
    if (!surface[idx] && !outside[idx]) {
      outside[idx] = 1;
      stack.push_back(idx);
    }
  };
  const auto& d = g.dims;
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        if (i == 0 || j == 0 || k == 0 || i == d[0] - 1 || j == d[1] - 1 || k == d[2] - 1) seed(i, j, k);
      }
    }
  }
  while (!stack.empty()) {
    const auto idx = stack.back();
    stack.pop_back();
    const auto [i, j, k] = g.unravel(idx);
    if (i > 0) seed(i - 1, j, k);
    if (i + 1 < d[0]) seed(i + 1, j, k);
    if (j > 0) seed(i, j - 1, k);
    if (j + 1 < d[1]) seed(i, j + 1, k);
    if (k > 0) seed(i, j, k - 1);
    if (k + 1 < d[2]) seed(i, j, k + 1);
  }
  return outside;
}

}  // namespace

GridGeometry fit_grid(const Aabb& bounds, double voxel_size, double band_width) {
  check_voxel_args(voxel_size, band_width);
  GridGeometry g;
  g.voxel_size = voxel_size;
  const double pad = band_width + voxel_size;
  // The padded box is centered in the grid so that geometry smaller than a
  // cell sits strictly inside one cell instead of on a cell boundary.
  for (int a = 0; a < 3; ++a) {
    const double lo = bounds.min[a] - pad;
    const double hi = bounds.max[a] + pad;
    const double center = 0.5 * (bounds.min[a] + bounds.max[a]);
    const double n = std::ceil((hi - lo) / voxel_size);
    if (!(n < 1e9)) throw VoxelizeError("grid dimension overflow; voxel_size too small");
    int dim = std::max(1, static_cast<int>(n));
    for (;;) {
      const double origin = center - 0.5 * static_cast<double>(dim) * voxel_size;
      if (origin <= lo && origin + static_cast<double>(dim) * voxel_size >= hi) {
        g.origin[a] = origin;
        break;
      }
      ++dim;
    }
    g.dims[a] = dim;
  }
  return g;
}

VoxMap voxelize_surface(const TriangleMesh& mesh, const VoxelizeOptions& options) {
  check_voxel_args(options.voxel_size, options.band_width);
  if (mesh.empty()) throw VoxelizeError("cannot voxelize an empty mesh");
  validate_mesh(mesh);

  const auto grid = fit_grid(mesh_bounds(mesh), options.voxel_size, options.band_width);
  const double cells = static_cast<double>(grid.dims[0]) * grid.dims[1] * grid.dims[2];
  if (cells > static_cast<double>(options.cell_budget)) {
    throw VoxelizeError("grid of " + std::to_string(grid.dims[0]) + "x" + std::to_string(grid.dims[1]) + "x" +
                        std::to_string(grid.dims[2]) + " cells exceeds the cell budget of " +
                        std::to_string(options.cell_budget));
  }

  VoxMap map(grid, options.band_width);
  const auto surface_cells = options.exec == Exec::Parallel ? kernels::mark_surface_parallel(mesh, grid)
                                                            : kernels::mark_surface_serial(mesh, grid);
  std::vector<std::uint8_t> surface(grid.cell_count(), 0);
  for (std::size_t s = 0; s < surface_cells.cells.size(); ++s) {
    surface[surface_cells.cells[s]] = 1;
    map.set_surface(surface_cells.cells[s], surface_cells.normals[s]);
  }

  const auto outside = flood_outside(grid, surface);
  for (std::size_t idx = 0; idx < grid.cell_count(); ++idx) {
    if (!surface[idx] && !outside[idx]) map.set_interior(idx);
  }

  if (options.band_width > 0.0) {
    const int radius = static_cast<int>(std::floor(options.band_width / options.voxel_size)) + 1;
    const auto d2 = options.exec == Exec::Parallel ? kernels::band_distance_sq_parallel(grid, surface, radius)
                                                   : kernels::band_distance_sq_serial(grid, surface, radius);
    const std::int64_t beyond = static_cast<std::int64_t>(radius) * radius + 1;
    for (std::size_t idx = 0; idx < grid.cell_count(); ++idx) {
      if (!outside[idx] || d2[idx] >= beyond) continue;
      const double dist = options.voxel_size * std::sqrt(static_cast<double>(d2[idx]));
      if (dist <= options.band_width) map.set_proximity(idx, dist);
    }
  }
  return map;
}

VoxMap voxelize_surface(const TriangleMesh& mesh, double voxel_size, double band_width) {
  VoxelizeOptions o;
  o.voxel_size = voxel_size;
  o.band_width = band_width;
  return voxelize_surface(mesh, o);
}

VoxMap cook_voxmaps(const std::vector<PosedPart>& parts, const VoxelizeOptions& options) {
  if (parts.empty()) throw VoxelizeError("cook_voxmaps needs at least one part");
  std::vector<TriangleMesh> posed;
  posed.reserve(parts.size());
  for (const auto& p : parts) posed.push_back(transform_mesh(p.mesh, p.pose));
  return voxelize_surface(merge_meshes(posed), options);
}

VoxMap cook_voxmaps(const std::vector<PosedPart>& parts, double voxel_size, double band_width) {
  VoxelizeOptions o;
  o.voxel_size = voxel_size;
  o.band_width = band_width;
  return cook_voxmaps(parts, o);
}

}  // namespace vhap
