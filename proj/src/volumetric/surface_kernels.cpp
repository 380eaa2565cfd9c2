#include <algorithm>
#include <cmath>
#include <map>

#include <omp.h>

#include "vhap/kernels.hpp"

namespace vhap::kernels {

namespace {

struct CellRange {
  std::array<int, 3> lo;
  std::array<int, 3> hi;  // inclusive
};

// Candidate cells for a triangle: its bounding box widened by one cell so
// rounding in the index computation can never drop a touching cell.
CellRange candidate_cells(const std::array<Vec3, 3>& p, const GridGeometry& g) {
  CellRange r{};
  for (int a = 0; a < 3; ++a) {
    const double mn = std::min({p[0][a], p[1][a], p[2][a]});
    const double mx = std::max({p[0][a], p[1][a], p[2][a]});
    const auto lo = static_cast<long long>(std::floor((mn - g.origin[a]) / g.voxel_size)) - 1;
    const auto hi = static_cast<long long>(std::floor((mx - g.origin[a]) / g.voxel_size)) + 1;
    r.lo[a] = static_cast<int>(std::clamp<long long>(lo, 0, g.dims[a] - 1));
    r.hi[a] = static_cast<int>(std::clamp<long long>(hi, 0, g.dims[a] - 1));
  }
  return r;
}

template <typename Visit>
void for_each_overlap(const std::array<Vec3, 3>& p, const GridGeometry& g, Visit&& visit) {
  const auto r = candidate_cells(p, g);
  for (int k = r.lo[2]; k <= r.hi[2]; ++k) {
    for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
      for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
        if (triangle_box_overlap(p[0], p[1], p[2], g.cell_min(i, j, k), g.cell_max(i, j, k))) {
          visit(g.linear_index(i, j, k));
        }
      }
    }
  }
}

// Area-weighted normal of the triangles touching one cell, summed in
// ascending rank order. Falls back to the largest contributing triangle
// when the contributions cancel (e.g. both sides of a thin sheet).
template <typename RankIt>
Vec3 resolve_normal(const CanonicalTriangles& ct, RankIt first, RankIt last) {
  Vec3 sum = Vec3::Zero();
  double total = 0.0;
  double best_area = -1.0;
  std::uint32_t best = 0;
  for (auto it = first; it != last; ++it) {
    const Vec3& av = ct.area_vectors[*it];
    sum += av;
    const double area = av.norm();
    total += area;
    if (area > best_area) {
      best_area = area;
      best = *it;
    }
  }
  const double n = sum.norm();
  if (n > 1e-12 * total && n > 0.0) return sum / n;
  if (best_area > 0.0) return ct.area_vectors[best] / best_area;
  return Vec3::UnitZ();
}

}  // namespace

SurfaceCells mark_surface_serial(const TriangleMesh& mesh, const GridGeometry& grid) {
  const auto ct = canonicalize(mesh);
  std::map<std::size_t, std::vector<std::uint32_t>> touched;
  for (std::uint32_t rank = 0; rank < ct.order.size(); ++rank) {
    for_each_overlap(mesh.corners(ct.order[rank]), grid,
                     [&](std::size_t cell) { touched[cell].push_back(rank); });
  }
  SurfaceCells out;
  out.cells.reserve(touched.size());
  out.normals.reserve(touched.size());
  for (const auto& [cell, ranks] : touched) {
    out.cells.push_back(cell);
    out.normals.push_back(resolve_normal(ct, ranks.begin(), ranks.end()));
  }
  return out;
}

SurfaceCells mark_surface_parallel(const TriangleMesh& mesh, const GridGeometry& grid) {
  const auto ct = canonicalize(mesh);
  struct Hit {
    std::size_t cell;
    std::uint32_t rank;
    bool operator<(const Hit& o) const { return cell != o.cell ? cell < o.cell : rank < o.rank; }
  };

  const auto ntri = static_cast<std::int64_t>(ct.order.size());
  std::vector<std::vector<Hit>> per_thread(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
  {
    auto& local = per_thread[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t rank = 0; rank < ntri; ++rank) {
      const auto r = static_cast<std::uint32_t>(rank);
      for_each_overlap(mesh.corners(ct.order[r]), grid, [&](std::size_t cell) { local.push_back({cell, r}); });
    }
  }

  std::vector<Hit> hits;
  std::size_t total = 0;
  for (const auto& v : per_thread) total += v.size();
  hits.reserve(total);
  for (auto& v : per_thread) hits.insert(hits.end(), v.begin(), v.end());
  std::sort(hits.begin(), hits.end());

  // Group boundaries, then resolve each group's normal independently.
  std::vector<std::size_t> starts;
  for (std::size_t h = 0; h < hits.size(); ++h) {
    if (h == 0 || hits[h].cell != hits[h - 1].cell) starts.push_back(h);
  }
  starts.push_back(hits.size());

  SurfaceCells out;
  const auto ncell = static_cast<std::int64_t>(starts.size()) - 1;
  out.cells.resize(static_cast<std::size_t>(std::max<std::int64_t>(ncell, 0)));
  out.normals.resize(out.cells.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t g = 0; g < ncell; ++g) {
    const auto b = starts[static_cast<std::size_t>(g)];
    const auto e = starts[static_cast<std::size_t>(g) + 1];
    std::vector<std::uint32_t> ranks;
    ranks.reserve(e - b);
    for (auto h = b; h < e; ++h) ranks.push_back(hits[h].rank);
    out.cells[static_cast<std::size_t>(g)] = hits[b].cell;
    out.normals[static_cast<std::size_t>(g)] = resolve_normal(ct, ranks.begin(), ranks.end());
  }
  return out;
}

}  // namespace vhap::kernels
