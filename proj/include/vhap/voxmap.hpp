#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vhap/geometry.hpp"

namespace vhap {

enum class VoxelTag : std::uint8_t { Empty = 0, Proximity = 1, Surface = 2, Interior = 3 };

const char* to_string(VoxelTag tag);

// Value view of one cell. `distance` is meaningful for Proximity cells,
// `normal` for Surface cells; both are zero otherwise.
struct VoxelState {
  VoxelTag tag = VoxelTag::Empty;
  double distance = 0.0;
  Vec3 normal = Vec3::Zero();

  static VoxelState empty() { return {}; }
  static VoxelState interior() { return {VoxelTag::Interior, 0.0, Vec3::Zero()}; }
  static VoxelState proximity(double d) { return {VoxelTag::Proximity, d, Vec3::Zero()}; }
  static VoxelState surface(const Vec3& n) { return {VoxelTag::Surface, 0.0, n}; }
};

using GridDims = std::array<int, 3>;

// Uniform grid geometry. Cell (i, j, k) covers the half-open box
// [origin + i*s, origin + (i+1)*s) per axis; linear index is x-fastest.
struct GridGeometry {
  Vec3 origin = Vec3::Zero();
  double voxel_size = 1.0;
  GridDims dims{0, 0, 0};

  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }
  std::size_t linear_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(dims[1]) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(dims[0]) +
           static_cast<std::size_t>(i);
  }
  std::array<int, 3> unravel(std::size_t idx) const {
    const auto nx = static_cast<std::size_t>(dims[0]);
    const auto ny = static_cast<std::size_t>(dims[1]);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny), static_cast<int>(idx / (nx * ny))};
  }
  double cell_lo(int axis, int i) const { return origin[axis] + static_cast<double>(i) * voxel_size; }
  double cell_hi(int axis, int i) const { return origin[axis] + static_cast<double>(i + 1) * voxel_size; }
  Vec3 cell_min(int i, int j, int k) const { return {cell_lo(0, i), cell_lo(1, j), cell_lo(2, k)}; }
  Vec3 cell_max(int i, int j, int k) const { return {cell_hi(0, i), cell_hi(1, j), cell_hi(2, k)}; }
  Vec3 cell_center(int i, int j, int k) const {
    return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  bool in_range(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  }
  // Cell containing p under the half-open convention, if inside the grid.
  std::optional<std::array<int, 3>> locate(const Vec3& p) const;
};

// Dense voxel occupancy grid. Each cell is one 32-bit word: the tag in the
// top two bits and, for Surface/Proximity cells, a slot index into the
// normal or distance payload arrays in the low 30 bits.
class VoxMap {
 public:
  VoxMap() = default;
  VoxMap(const GridGeometry& grid, double band_width);

  const GridGeometry& grid() const { return grid_; }
  const Vec3& origin() const { return grid_.origin; }
  double voxel_size() const { return grid_.voxel_size; }
  const GridDims& dims() const { return grid_.dims; }
  double band_width() const { return band_width_; }
  std::size_t cell_count() const { return cells_.size(); }
  std::size_t surface_count() const { return surface_count_; }
  std::size_t count(VoxelTag tag) const;

  VoxelTag tag(std::size_t idx) const { return static_cast<VoxelTag>(cells_[idx] >> kTagShift); }
  VoxelTag tag(int i, int j, int k) const { return tag(grid_.linear_index(i, j, k)); }
  VoxelState state(std::size_t idx) const;
  VoxelState state(int i, int j, int k) const { return state(grid_.linear_index(i, j, k)); }

  // Hot-path accessors used by contact detection.
  std::uint32_t word(std::size_t idx) const { return cells_[idx]; }
  static VoxelTag word_tag(std::uint32_t w) { return static_cast<VoxelTag>(w >> kTagShift); }
  const Vec3& word_normal(std::uint32_t w) const { return normals_[w & kSlotMask]; }

  void set_empty(std::size_t idx);
  void set_interior(std::size_t idx);
  void set_surface(std::size_t idx, const Vec3& unit_normal);
  void set_proximity(std::size_t idx, double distance);

 private:
  static constexpr unsigned kTagShift = 30;
  static constexpr std::uint32_t kSlotMask = (1u << kTagShift) - 1u;

  void retag(std::size_t idx, VoxelTag tag, std::uint32_t slot);

  GridGeometry grid_;
  double band_width_ = 0.0;
  std::vector<std::uint32_t> cells_;
  std::vector<Vec3> normals_;
  std::vector<double> distances_;
  std::size_t surface_count_ = 0;
};

// Cell-by-cell equality of grid geometry, tags, and payloads (bitwise).
bool same_cells(const VoxMap& a, const VoxMap& b);

// Debug dump: header `voxmap nx ny nz s ox oy oz`, then one character per
// cell ('.', 'p', 's', 'i'), x-fastest, one row per line and one z-slice per
// paragraph.
void write_voxmap_dump(std::ostream& out, const VoxMap& map);

}  // namespace vhap
