#include <algorithm>

#include "vhap/kernels.hpp"

namespace vhap::kernels {

std::vector<std::int64_t> band_distance_sq_serial(const GridGeometry& grid, const std::vector<std::uint8_t>& surface,
                                                  int radius) {
  const std::int64_t beyond = static_cast<std::int64_t>(radius) * radius + 1;
  std::vector<std::int64_t> dist(grid.cell_count(), beyond);
  const auto& d = grid.dims;
  for (std::size_t idx = 0; idx < surface.size(); ++idx) {
    if (!surface[idx]) continue;
    const auto [ci, cj, ck] = grid.unravel(idx);
    for (int dk = -radius; dk <= radius; ++dk) {
      for (int dj = -radius; dj <= radius; ++dj) {
        for (int di = -radius; di <= radius; ++di) {
          const int i = ci + di, j = cj + dj, k = ck + dk;
          if (i < 0 || j < 0 || k < 0 || i >= d[0] || j >= d[1] || k >= d[2]) continue;
          const std::int64_t d2 = static_cast<std::int64_t>(di) * di + static_cast<std::int64_t>(dj) * dj +
                                  static_cast<std::int64_t>(dk) * dk;
          auto& slot = dist[grid.linear_index(i, j, k)];
          slot = std::min(slot, d2);
        }
      }
    }
  }
  for (auto& v : dist) {
    if (v >= beyond) v = beyond;
  }
  return dist;
}

// Separable squared-distance transform. Each axis pass is an exact min-plus
// convolution with (offset)^2 restricted to |offset| <= radius, which loses
// nothing below the cap because every offset of a qualifying neighbor is
// itself within the radius.
std::vector<std::int64_t> band_distance_sq_parallel(const GridGeometry& grid,
                                                    const std::vector<std::uint8_t>& surface, int radius) {
  const std::int64_t beyond = static_cast<std::int64_t>(radius) * radius + 1;
  const std::size_t n = grid.cell_count();
  std::vector<std::int64_t> a(n), b(n);

#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(n); ++idx) {
    a[static_cast<std::size_t>(idx)] = surface[static_cast<std::size_t>(idx)] ? 0 : beyond;
  }

  const std::array<std::size_t, 3> stride{1, static_cast<std::size_t>(grid.dims[0]),
                                          static_cast<std::size_t>(grid.dims[0]) *
                                              static_cast<std::size_t>(grid.dims[1])};
  for (int axis = 0; axis < 3; ++axis) {
    const int len = grid.dims[axis];
    const std::size_t step = stride[axis];
    const auto lines = static_cast<std::int64_t>(n / static_cast<std::size_t>(len));
#pragma omp parallel for schedule(static)
    for (std::int64_t line = 0; line < lines; ++line) {
      // Base index of the line: decompose `line` over the other two axes.
      const auto l = static_cast<std::size_t>(line);
      const std::size_t base = (l / step) * step * static_cast<std::size_t>(len) + (l % step);
      for (int x = 0; x < len; ++x) {
        std::int64_t best = beyond;
        const int x0 = std::max(0, x - radius);
        const int x1 = std::min(len - 1, x + radius);
        for (int y = x0; y <= x1; ++y) {
          const std::int64_t v = a[base + static_cast<std::size_t>(y) * step];
          if (v >= beyond) continue;
          const std::int64_t off = x - y;
          best = std::min(best, v + off * off);
        }
        b[base + static_cast<std::size_t>(x) * step] = std::min(best, beyond);
      }
    }
    std::swap(a, b);
  }
  return a;
}

}  // namespace vhap::kernels
