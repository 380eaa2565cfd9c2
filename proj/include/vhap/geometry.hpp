#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vhap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Tolerance used to accept a matrix as a proper rotation.
inline constexpr double kRotationTolerance = 1e-9;

class MeshError : public std::runtime_error {
 public:
  MeshError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  // Prefixes `context: ` to the message and keeps the line number.
  MeshError(const std::string& context, const MeshError& inner)
      : std::runtime_error(context + ": " + inner.what()), line_(inner.line_) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  void expand(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
};

using Triangle = std::array<std::uint32_t, 3>;

// Indexed triangle surface in meters. Invariants are enforced by
// validate_mesh(); every loader and builder calls it before returning.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  double scale_applied = 1.0;

  bool empty() const { return triangles.empty(); }
  std::array<Vec3, 3> corners(std::size_t t) const {
    const auto& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }
};

void validate_mesh(const TriangleMesh& mesh);

// Plain-text indexed triangle format: `v x y z`, `f i j k` (1-based),
// `#` comments and blank lines ignored. Coordinates are multiplied by
// unit_scale.
TriangleMesh parse_mesh(std::istream& in, double unit_scale);
TriangleMesh load_mesh(const std::filesystem::path& path, double unit_scale);
void write_mesh(std::ostream& out, const TriangleMesh& mesh);

Aabb mesh_bounds(const TriangleMesh& mesh);

class RigidPose {
 public:
  RigidPose() = default;
  // Throws std::invalid_argument unless rotation is orthonormal with det +1
  // (within kRotationTolerance) and position is finite.
  RigidPose(const Mat3& rotation, const Vec3& position);

  static RigidPose identity() { return {}; }
  static RigidPose translation(const Vec3& p);
  static RigidPose from_quaternion(const Quat& q, const Vec3& p);
  static RigidPose from_axis_angle(const Vec3& axis, double angle, const Vec3& p = Vec3::Zero());

  const Mat3& rotation() const { return rotation_; }
  const Vec3& position() const { return position_; }
  Quat quaternion() const;

  // (this ∘ b): apply b first, then this.
  RigidPose compose(const RigidPose& b) const;
  RigidPose inverse() const;
  Vec3 apply(const Vec3& p) const { return rotation_ * p + position_; }

  RigidPose operator*(const RigidPose& b) const { return compose(b); }

 private:
  struct Unchecked {};
  RigidPose(Unchecked, const Mat3& rotation, const Vec3& position)
      : rotation_(rotation), position_(position) {}

  Mat3 rotation_ = Mat3::Identity();
  Vec3 position_ = Vec3::Zero();
};

bool is_proper_rotation(const Mat3& r, double tol = kRotationTolerance);

// Rotation vector (axis * angle) of r, angle in [0, pi].
Vec3 rotation_vector(const Mat3& r);

// Rotation vector of to * from^T in the world frame; exactly zero when the
// two orientations are identical.
Vec3 relative_rotation_vector(const Mat3& from, const Mat3& to);

// Geodesic angle between two orientations.
double rotation_angle_between(const Mat3& a, const Mat3& b);

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidPose& pose);

// Concatenates meshes into one soup; vertex indices are rebased.
TriangleMesh merge_meshes(const std::vector<TriangleMesh>& meshes);

// Outward-oriented axis-aligned box, 8 vertices / 12 triangles.
TriangleMesh make_box(const Vec3& min, const Vec3& max);

// Outward-oriented icosphere obtained by recursive subdivision.
TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());

}  // namespace vhap
