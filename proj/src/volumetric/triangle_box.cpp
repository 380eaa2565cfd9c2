#include <algorithm>
#include <array>
#include <numeric>

#include "vhap/kernels.hpp"

namespace vhap::kernels {

namespace {

// Projection interval of the closed box [lo, hi] onto axis u.
inline void box_interval(const Vec3& u, const Vec3& lo, const Vec3& hi, double& rmin, double& rmax) {
  rmin = 0.0;
  rmax = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double a = u[k] * lo[k];
    const double b = u[k] * hi[k];
    rmin += std::min(a, b);
    rmax += std::max(a, b);
  }
}

inline bool separated_on(const Vec3& u, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& lo,
                         const Vec3& hi) {
  const double pa = u.dot(a);
  const double pb = u.dot(b);
  const double pc = u.dot(c);
  double rmin, rmax;
  box_interval(u, lo, hi, rmin, rmax);
  return std::max({pa, pb, pc}) < rmin || std::min({pa, pb, pc}) > rmax;
}

}  // namespace

bool triangle_box_overlap(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& lo, const Vec3& hi) {
  // Box face normals: plain coordinate comparisons, exact.
  for (int k = 0; k < 3; ++k) {
    if (std::max({a[k], b[k], c[k]}) < lo[k] || std::min({a[k], b[k], c[k]}) > hi[k]) return false;
  }

  const Vec3 e0 = b - a;
  const Vec3 e1 = c - b;
  const Vec3 e2 = a - c;

  if (separated_on(e0.cross(-e2), a, b, c, lo, hi)) return false;

  const std::array<Vec3, 3> edges{e0, e1, e2};
  for (const auto& e : edges) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 u = e.cross(Vec3::Unit(k));
      if (separated_on(u, a, b, c, lo, hi)) return false;
    }
  }
  return true;
}

CanonicalTriangles canonicalize(const TriangleMesh& mesh) {
  const auto n = mesh.triangles.size();
  auto lex_less = [](const Vec3& p, const Vec3& q) {
    if (p.x() != q.x()) return p.x() < q.x();
    if (p.y() != q.y()) return p.y() < q.y();
    return p.z() < q.z();
  };

  // Rotate each triangle so its lexicographically smallest corner comes
  // first; orientation is preserved.
  std::vector<std::array<Vec3, 3>> keyed(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto p = mesh.corners(t);
    int first = 0;
    if (lex_less(p[1], p[first])) first = 1;
    if (lex_less(p[2], p[first])) first = 2;
    keyed[t] = {p[first], p[(first + 1) % 3], p[(first + 2) % 3]};
  }

  CanonicalTriangles out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), 0u);
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::uint32_t l, std::uint32_t r) {
    for (int v = 0; v < 3; ++v) {
      if (lex_less(keyed[l][v], keyed[r][v])) return true;
      if (lex_less(keyed[r][v], keyed[l][v])) return false;
    }
    return false;
  });

  out.area_vectors.resize(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    const auto& p = keyed[out.order[rank]];
    out.area_vectors[rank] = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
  }
  return out;
}

}  // namespace vhap::kernels
