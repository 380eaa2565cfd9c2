#include "vhap/geometry.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vhap {

namespace {

bool parse_double(const std::string& token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_index(const std::string& token, long long& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

void validate_mesh(const TriangleMesh& mesh) {
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) throw MeshError("non-finite vertex coordinate");
  }
  const auto n = mesh.vertices.size();
  for (const auto& t : mesh.triangles) {
    for (auto i : t) {
      if (i >= n) throw MeshError("triangle index out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshError("triangle repeats a vertex index");
    }
  }
}

TriangleMesh parse_mesh(std::istream& in, double unit_scale) {
  if (!(unit_scale > 0.0) || !std::isfinite(unit_scale)) {
    throw MeshError("unit_scale must be positive");
  }
  TriangleMesh mesh;
  mesh.scale_applied = unit_scale;

  struct PendingFace {
    std::array<long long, 3> idx;
    int line;
  };
  std::vector<PendingFace> faces;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;

    std::array<std::string, 3> tok;
    std::string extra;
    if (head == "v" || head == "f") {
      if (!(ls >> tok[0] >> tok[1] >> tok[2]) || (ls >> extra)) {
        throw MeshError("expected exactly three values after '" + head + "'", line_no);
      }
    }
    if (head == "v") {
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[k], p[k])) throw MeshError("bad coordinate '" + tok[k] + "'", line_no);
      }
      if (!p.allFinite()) throw MeshError("non-finite coordinate", line_no);
      mesh.vertices.push_back(p * unit_scale);
    } else if (head == "f") {
      PendingFace f{{}, line_no};
      for (int k = 0; k < 3; ++k) {
        if (!parse_index(tok[k], f.idx[k])) throw MeshError("bad face index '" + tok[k] + "'", line_no);
      }
      faces.push_back(f);
    } else {
      throw MeshError("unknown directive '" + head + "'", line_no);
    }
  }

  const auto count = static_cast<long long>(mesh.vertices.size());
  for (const auto& f : faces) {
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      if (f.idx[k] < 1 || f.idx[k] > count) {
        throw MeshError("face index " + std::to_string(f.idx[k]) + " out of range (have " +
                            std::to_string(count) + " vertices)",
                        f.line);
      }
      t[k] = static_cast<std::uint32_t>(f.idx[k] - 1);
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshError("face repeats a vertex index", f.line);
    }
    mesh.triangles.push_back(t);
  }
  if (mesh.triangles.empty()) throw MeshError("mesh has no triangles");
  validate_mesh(mesh);
  return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path, double unit_scale) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot read mesh file '" + path.string() + "'");
  try {
    return parse_mesh(in, unit_scale);
  } catch (const MeshError& e) {
    throw MeshError(path.string(), e);
  }
}

void write_mesh(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

Aabb mesh_bounds(const TriangleMesh& mesh) {
  if (mesh.vertices.empty() || mesh.triangles.empty()) throw MeshError("bounds of an empty mesh");
  // Only vertices referenced by triangles count toward the box.
  Aabb box;
  box.min = Vec3::Constant(std::numeric_limits<double>::infinity());
  box.max = -box.min;
  for (const auto& t : mesh.triangles) {
    for (auto i : t) box.expand(mesh.vertices[i]);
  }
  return box;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidPose& pose) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = pose.apply(v);
  return out;
}

TriangleMesh merge_meshes(const std::vector<TriangleMesh>& meshes) {
  TriangleMesh out;
  for (const auto& m : meshes) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const auto& t : m.triangles) out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
  return out;
}

}  // namespace vhap
