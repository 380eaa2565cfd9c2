#include "vhap/voxmap.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace vhap {

const char* to_string(VoxelTag tag) {
  switch (tag) {
    case VoxelTag::Empty: return "empty";
    case VoxelTag::Proximity: return "proximity";
    case VoxelTag::Surface: return "surface";
    case VoxelTag::Interior: return "interior";
  }
  return "?";
}

std::optional<std::array<int, 3>> GridGeometry::locate(const Vec3& p) const {
  std::array<int, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double q = (p[a] - origin[a]) / voxel_size;
    // Written so that NaN falls through to "outside".
    if (!(q >= 0.0) || !(q < static_cast<double>(dims[a]))) return std::nullopt;
    idx[a] = static_cast<int>(q);
    if (idx[a] >= dims[a]) return std::nullopt;
  }
  return idx;
}

VoxMap::VoxMap(const GridGeometry& grid, double band_width) : grid_(grid), band_width_(band_width) {
  if (!(grid.voxel_size > 0.0)) throw std::invalid_argument("VoxMap: voxel_size must be positive");
  if (!(band_width >= 0.0)) throw std::invalid_argument("VoxMap: band_width must be non-negative");
  for (int d : grid.dims) {
    if (d <= 0) throw std::invalid_argument("VoxMap: dims must be positive");
  }
  if (grid.cell_count() > (std::size_t{1} << kTagShift)) {
    throw std::invalid_argument("VoxMap: grid exceeds addressable cell count");
  }
  cells_.assign(grid.cell_count(), 0u);
}

std::size_t VoxMap::count(VoxelTag t) const {
  std::size_t n = 0;
  for (auto w : cells_) n += (word_tag(w) == t);
  return n;
}

VoxelState VoxMap::state(std::size_t idx) const {
  const auto w = cells_[idx];
  switch (word_tag(w)) {
    case VoxelTag::Empty: return VoxelState::empty();
    case VoxelTag::Interior: return VoxelState::interior();
    case VoxelTag::Proximity: return VoxelState::proximity(distances_[w & kSlotMask]);
    case VoxelTag::Surface: return VoxelState::surface(normals_[w & kSlotMask]);
  }
  return {};
}

void VoxMap::retag(std::size_t idx, VoxelTag t, std::uint32_t slot) {
  if (word_tag(cells_[idx]) == VoxelTag::Surface) --surface_count_;
  if (t == VoxelTag::Surface) ++surface_count_;
  cells_[idx] = (static_cast<std::uint32_t>(t) << kTagShift) | slot;
}

void VoxMap::set_empty(std::size_t idx) { retag(idx, VoxelTag::Empty, 0); }

void VoxMap::set_interior(std::size_t idx) { retag(idx, VoxelTag::Interior, 0); }

void VoxMap::set_surface(std::size_t idx, const Vec3& unit_normal) {
  if (std::abs(unit_normal.norm() - 1.0) > 1e-9) throw std::invalid_argument("VoxMap: surface normal is not unit");
  const auto w = cells_[idx];
  if (word_tag(w) == VoxelTag::Surface) {
    normals_[w & kSlotMask] = unit_normal;
    return;
  }
  normals_.push_back(unit_normal);
  retag(idx, VoxelTag::Surface, static_cast<std::uint32_t>(normals_.size() - 1));
}

void VoxMap::set_proximity(std::size_t idx, double distance) {
  if (!(distance >= 0.0) || distance > band_width_) {
    throw std::invalid_argument("VoxMap: proximity distance outside [0, band_width]");
  }
  const auto w = cells_[idx];
  if (word_tag(w) == VoxelTag::Proximity) {
    distances_[w & kSlotMask] = distance;
    return;
  }
  distances_.push_back(distance);
  retag(idx, VoxelTag::Proximity, static_cast<std::uint32_t>(distances_.size() - 1));
}

bool same_cells(const VoxMap& a, const VoxMap& b) {
  const auto& ga = a.grid();
  const auto& gb = b.grid();
  auto bits = [](double x) { return std::bit_cast<std::uint64_t>(x); };
  if (ga.dims != gb.dims || bits(ga.voxel_size) != bits(gb.voxel_size)) return false;
  for (int k = 0; k < 3; ++k) {
    if (bits(ga.origin[k]) != bits(gb.origin[k])) return false;
  }
  if (a.cell_count() != b.cell_count() || a.surface_count() != b.surface_count()) return false;
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    const auto sa = a.state(i);
    const auto sb = b.state(i);
    if (sa.tag != sb.tag || bits(sa.distance) != bits(sb.distance)) return false;
    for (int k = 0; k < 3; ++k) {
      if (bits(sa.normal[k]) != bits(sb.normal[k])) return false;
    }
  }
  return true;
}

void write_voxmap_dump(std::ostream& out, const VoxMap& map) {
  const auto& g = map.grid();
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "voxmap " << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << ' ' << g.voxel_size << ' '
      << g.origin.x() << ' ' << g.origin.y() << ' ' << g.origin.z() << '\n';
  static constexpr char glyph[] = {'.', 'p', 's', 'i'};
  for (int k = 0; k < g.dims[2]; ++k) {
    if (k > 0) out << '\n';
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int i = 0; i < g.dims[0]; ++i) out << glyph[static_cast<int>(map.tag(i, j, k))];
      out << '\n';
    }
  }
}

}  // namespace vhap
