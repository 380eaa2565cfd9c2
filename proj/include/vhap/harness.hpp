#pragma once

// Scripted assembly runs: a scenario names the parts, then a sequence of
// steps each moving one active part along a trajectory against the map
// cooked from everything already assembled.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vhap/device.hpp"
#include "vhap/geometry.hpp"
#include "vhap/volumetric.hpp"
#include "vhap/vps.hpp"

namespace vhap {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Waypoint {
  double t = 0.0;
  RigidPose pose;
};

// Piecewise linear position and slerp orientation; clamped outside the
// waypoint time range.
class Trajectory {
 public:
  // Throws std::invalid_argument on fewer than two waypoints or times that
  // are not strictly increasing.
  explicit Trajectory(std::vector<Waypoint> waypoints);

  RigidPose sample(double t) const;
  double start() const { return waypoints_.front().t; }
  double end() const { return waypoints_.back().t; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }

 private:
  std::vector<Waypoint> waypoints_;
};

struct ScenarioPart {
  std::string name;
  std::filesystem::path path;
  double scale = 1.0;
  TriangleMesh mesh;
  int line = 0;
};

struct ScenarioStep {
  std::string name;
  std::string active_part;
  RigidPose target;
  std::vector<Waypoint> waypoints;
  int line = 0;
};

struct ScenarioConfig {
  double voxel_size = 0.005;
  double band_width = 0.01;
  double spacing = 0.005;
  std::size_t cell_budget = std::size_t{1} << 27;
  std::size_t point_budget = 1'000'000;
  RenderConfig render;
  HandleGeometry handle;
  DeviceLimits limits;
  double pos_tol = 0.0;  // 0 selects 2 * voxel_size
  double ang_tol = 0.05;
  std::size_t channel_capacity = 4;
  std::string net_bind = "127.0.0.1:0";
  std::string net_peer;  // empty: loop back to the other local socket

  double position_tolerance() const { return pos_tol > 0.0 ? pos_tol : 2.0 * voxel_size; }
  // Numeric settings announced in Config packets.
  std::vector<std::pair<std::string, double>> announced() const;
};

struct Scenario {
  std::filesystem::path source;
  std::vector<ScenarioPart> parts;
  std::vector<ScenarioStep> steps;
  ScenarioConfig config;

  const ScenarioPart& part(const std::string& name) const;
  // Parts never moved by any step; they stay at the identity pose.
  std::vector<std::string> base_parts() const;
};

// Line format (one directive per line, `#` comments):
//   PART name path scale
//   CONFIG key value
//   STEP name active_part tx ty tz qw qx qy qz
//   WAYPOINT t tx ty tz qw qx qy qz     (belongs to the preceding STEP)
// Mesh paths are relative to `base_dir`.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

// Static parts for step `k`: base parts at identity plus the active parts
// of steps before k at their target poses.
std::vector<PosedPart> cooked_parts(const Scenario& s, std::size_t k);
VoxMap cook_step_map(const Scenario& s, std::size_t k, Exec exec = Exec::Parallel);

struct TraceRow {
  double t = 0.0;
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  std::size_t contacts = 0;
  double rate_hz = 0.0;
};

enum class TransportKind { InProcess, Udp };

struct RunOptions {
  TransportKind transport = TransportKind::InProcess;
  std::optional<std::string> bind;  // overrides net.bind
  std::optional<std::string> peer;  // overrides net.peer
  std::optional<double> rate_hz;    // overrides the render rate
  // Restricts the run to the first `max_steps` steps.
  std::optional<std::size_t> max_steps;
};

struct StepReport {
  std::string name;
  std::string active_part;
  std::size_t surface_voxels = 0;
  std::size_t pointshell_size = 0;
  std::size_t frames = 0;
  std::size_t deep_penetration_frames = 0;
  std::size_t saturated_frames = 0;
  double median_rate_hz = 0.0;
  double min_rate_hz = 0.0;
  double position_error = 0.0;
  double angle_error = 0.0;
  bool converged = false;
  std::vector<TraceRow> trace;
};

struct RunReport {
  TransportKind transport = TransportKind::InProcess;
  std::vector<StepReport> steps;
  double median_rate_hz = 0.0;
  double min_rate_hz = 0.0;
  std::size_t bytes_transferred = 0;
  double simulated_seconds = 0.0;
  std::optional<double> network_load_bps;  // UDP runs only

  bool all_converged() const;
};

// Runs every step in simulated time: device pose -> Pose datagram ->
// render_step -> Wrench datagram -> device statics and trace.
RunReport run_assembly(const Scenario& scenario, const RunOptions& options = {});

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace(const std::filesystem::path& path, const std::vector<TraceRow>& rows);
void write_report(std::ostream& out, const RunReport& report);

// Writes one `<step>.csv` per step and `report.txt` into `dir`.
void write_run(const std::filesystem::path& dir, const RunReport& report);

struct TraceSummary {
  std::size_t rows = 0;
  double duration = 0.0;
  double peak_force = 0.0;
  double peak_torque = 0.0;
  std::size_t nonzero_rows = 0;
  std::size_t nonzero_intervals = 0;
  std::size_t max_contacts = 0;
};

std::vector<TraceRow> read_trace(std::istream& in);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);
TraceSummary summarize_trace(const std::vector<TraceRow>& rows);

// Render-loop throughput scene: a plate voxelized at the voxel size that
// brings its surface count within `tolerance` of `target_voxels`, and a
// cube pointshell of at least `min_points` pressed into its top face.
struct BenchSceneOptions {
  std::size_t target_voxels = 185030;
  std::size_t min_points = 5000;
  double tolerance = 0.01;
};

struct BenchScene {
  VoxMap map;
  PointShell shell;
  RigidPose contact_pose;
  double voxel_size = 0.0;
};

BenchScene make_bench_scene(const BenchSceneOptions& options = {});

struct RenderBenchResult {
  std::size_t steps = 0;
  double seconds = 0.0;
  double median_rate_hz = 0.0;
  double min_rate_hz = 0.0;
  double mean_contacts = 0.0;
  std::size_t min_contacts = 0;
};

// Holds the device at the contact pose and runs render steps for `seconds`
// of wall time; rates come from the per-step timings.
RenderBenchResult run_render_bench(const BenchScene& scene, double seconds, const RenderConfig& cfg = {});

}  // namespace vhap
