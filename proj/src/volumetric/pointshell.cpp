#include <cmath>
#include <unordered_map>

#include "vhap/volumetric.hpp"

namespace vhap {

namespace {

// Rows parallel to the longest edge, stepping toward the opposite vertex;
// each row is split into equal intervals no longer than `spacing`.
template <typename Emit>
void sample_triangle(const Vec3& p0, const Vec3& p1, const Vec3& p2, double spacing, Emit&& emit) {
  const std::array<Vec3, 3> p{p0, p1, p2};
  int base = 0;
  double longest = -1.0;
  for (int e = 0; e < 3; ++e) {
    const double len = (p[(e + 1) % 3] - p[e]).norm();
    if (len > longest) {
      longest = len;
      base = e;
    }
  }
  const Vec3& a = p[base];
  const Vec3& b = p[(base + 1) % 3];
  const Vec3& apex = p[(base + 2) % 3];

  const Vec3 ab = b - a;
  const Vec3 ac = apex - a;
  const double height = longest > 0.0 ? ab.cross(ac).norm() / longest : 0.0;
  const long rows = std::max(1L, static_cast<long>(std::ceil(height / spacing)));
  for (long r = 0; r <= rows; ++r) {
    const double t = static_cast<double>(r) / static_cast<double>(rows);
    const Vec3 from = a + t * (apex - a);
    const Vec3 to = b + t * (apex - b);
    const double len = (to - from).norm();
    const long k = static_cast<long>(std::ceil(len / spacing));
    if (k == 0) {
      emit(from);
      continue;
    }
    for (long q = 0; q <= k; ++q) emit(from + (static_cast<double>(q) / static_cast<double>(k)) * (to - from));
  }
}

struct CellKey {
  long long x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

}  // namespace

PointShell build_pointshell(const TriangleMesh& mesh, const PointShellOptions& options) {
  const double s = options.spacing;
  if (!(s > 0.0) || !std::isfinite(s)) throw VoxelizeError("pointshell spacing must be positive");
  if (mesh.empty()) throw VoxelizeError("cannot sample an empty mesh");
  validate_mesh(mesh);

  // Raw sample count up front so a tiny spacing fails before allocating.
  std::size_t raw = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto c = mesh.corners(t);
    sample_triangle(c[0], c[1], c[2], s, [&](const Vec3&) { ++raw; });
    if (raw > 8 * options.point_budget) throw VoxelizeError("pointshell point budget exceeded");
  }

  PointShell shell;
  shell.spacing = s;
  const double merge = s / 4.0;
  const double cell = merge;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> buckets;
  buckets.reserve(raw);
  auto key_of = [&](const Vec3& p) {
    return CellKey{static_cast<long long>(std::floor(p.x() / cell)), static_cast<long long>(std::floor(p.y() / cell)),
                   static_cast<long long>(std::floor(p.z() / cell))};
  };

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto c = mesh.corners(t);
    const Vec3 n = (c[1] - c[0]).cross(c[2] - c[0]);
    const double area2 = n.norm();
    if (!(area2 > 0.0)) continue;
    const Vec3 inward = -n / area2;
    sample_triangle(c[0], c[1], c[2], s, [&](const Vec3& p) {
      const auto k = key_of(p);
      for (long long dz = -1; dz <= 1; ++dz) {
        for (long long dy = -1; dy <= 1; ++dy) {
          for (long long dx = -1; dx <= 1; ++dx) {
            auto it = buckets.find({k.x + dx, k.y + dy, k.z + dz});
            if (it == buckets.end()) continue;
            for (auto idx : it->second) {
              if ((shell.points[idx] - p).norm() <= merge) return;
            }
          }
        }
      }
      buckets[k].push_back(static_cast<std::uint32_t>(shell.points.size()));
      shell.points.push_back(p);
      shell.normals.push_back(inward);
    });
    if (shell.points.size() > options.point_budget) throw VoxelizeError("pointshell point budget exceeded");
  }
  return shell;
}

PointShell build_pointshell(const TriangleMesh& mesh, double spacing) {
  PointShellOptions o;
  o.spacing = spacing;
  return build_pointshell(mesh, o);
}

}  // namespace vhap
