#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "vhap/harness.hpp"

namespace vhap {

namespace {

constexpr double kPlateHalf = 0.15;
constexpr double kPlateThickness = 0.02;
constexpr double kCubeSide = 0.04;

}  // namespace

BenchScene make_bench_scene(const BenchSceneOptions& options) {
  if (options.target_voxels == 0 || options.min_points == 0) throw std::invalid_argument("empty bench target");
  const auto plate = make_box({-kPlateHalf, -kPlateHalf, -kPlateThickness}, {kPlateHalf, kPlateHalf, 0.0});
  const double target = static_cast<double>(options.target_voxels);

  // Surface count scales like 1/s^2, so s * sqrt(count / target) is a
  // fixed-point step toward the target.
  BenchScene scene;
  double s = 2.0 * kPlateHalf * std::sqrt(2.0 / target);
  for (int iter = 0; iter < 40; ++iter) {
    scene.map = voxelize_surface(plate, s, 0.0);
    const double count = static_cast<double>(scene.map.surface_count());
    scene.voxel_size = s;
    if (std::abs(count - target) <= options.tolerance * target) break;
    double next = s * std::sqrt(count / target);
    if (next == s) next = s * (count > target ? 1.0 + 1e-4 : 1.0 - 1e-4);
    s = next;
  }
  if (std::abs(static_cast<double>(scene.map.surface_count()) - target) > options.tolerance * target) {
    throw std::runtime_error("bench voxel-size search did not converge");
  }

  const auto cube = make_box(Vec3::Constant(-kCubeSide / 2), Vec3::Constant(kCubeSide / 2));
  double spacing = kCubeSide / std::sqrt(static_cast<double>(options.min_points) / 6.0);
  for (;;) {
    PointShellOptions po;
    po.spacing = spacing;
    scene.shell = build_pointshell(cube, po);
    if (scene.shell.size() >= options.min_points) break;
    spacing *= 0.97;
  }

  // Bottom face 0.3 voxel below the center of the topmost Surface cell of
  // the plate's central column.
  const auto& g = scene.map.grid();
  const auto cell = g.locate(Vec3(0.0, 0.0, -0.5 * s));
  if (!cell) throw std::logic_error("bench plate center outside grid");
  int top = -1;
  for (int k = 0; k < g.dims[2]; ++k) {
    if (scene.map.tag((*cell)[0], (*cell)[1], k) == VoxelTag::Surface) top = k;
  }
  const double cz = g.cell_center((*cell)[0], (*cell)[1], top).z();
  scene.contact_pose = RigidPose::translation({0.0, 0.0, cz - 0.3 * s + kCubeSide / 2});
  return scene;
}

RenderBenchResult run_render_bench(const BenchScene& scene, double seconds, const RenderConfig& cfg) {
  RenderLoop loop(scene.shell, scene.map, cfg, ToolState::at_rest(scene.contact_pose));
  std::vector<double> ns;
  ns.reserve(1 << 16);
  RenderBenchResult r;
  r.min_contacts = scene.shell.size();
  double contacts = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  while (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < seconds) {
    const auto out = loop.step(scene.contact_pose);
    ns.push_back(static_cast<double>(out.stats.step_time_ns));
    contacts += static_cast<double>(out.stats.contact_count);
    r.min_contacts = std::min(r.min_contacts, out.stats.contact_count);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.steps = ns.size();
  if (ns.empty()) return r;
  r.mean_contacts = contacts / static_cast<double>(ns.size());
  auto mid = ns.begin() + static_cast<std::ptrdiff_t>(ns.size() / 2);
  std::nth_element(ns.begin(), mid, ns.end());
  r.median_rate_hz = 1e9 / std::max(1.0, *mid);
  r.min_rate_hz = 1e9 / std::max(1.0, *std::max_element(ns.begin(), ns.end()));
  return r;
}

}  // namespace vhap
