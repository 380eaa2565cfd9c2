#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "vhap/harness.hpp"
#include "vhap/protocol.hpp"

using namespace vhap;
namespace fs = std::filesystem;

namespace {

const fs::path kAssets = VHAP_ASSETS_DIR;
const fs::path kMeshes = kAssets / "meshes";
const fs::path kScenarios = kAssets / "scenarios";

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, kMeshes);
}

int scenario_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ScenarioError& e) {
    return e.line();
  }
  return -1;
}

std::string trace_text(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  write_trace(out, rows);
  return out.str();
}

const char* kMinimal = R"(# one part, one step
PART tool tool_cube.mesh 1
STEP only tool 0 0 0.1 1 0 0 0
WAYPOINT 0 0 0 0.1 1 0 0 0
WAYPOINT 0.05 0 0 0.1 1 0 0 0
)";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VHAP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("minimal scenario parses") {
  const auto s = parse(kMinimal);
  REQUIRE(s.steps.size() == 1);
  CHECK(s.parts.size() == 1);
  CHECK(s.steps[0].active_part == "tool");
  CHECK(s.steps[0].waypoints.size() == 2);
  CHECK(s.steps[0].target.position() == Vec3(0, 0, 0.1));
  CHECK(s.part("tool").mesh.triangles.size() == 12);
  CHECK(s.base_parts().empty());
  CHECK(s.config.voxel_size == 0.005);
  CHECK(s.config.position_tolerance() == 0.01);
}

TEST_CASE("scenario errors name their line") {
  CHECK(scenario_error_line("PART tool tool_cube.mesh 1\nFROB 1 2\n") == 2);
  CHECK(scenario_error_line("PART tool tool_cube.mesh 1\n\nSTEP s ghost 0 0 0 1 0 0 0\nWAYPOINT 0 0 0 0 1 0 0 0\n"
                            "WAYPOINT 1 0 0 0 1 0 0 0\n") == 3);
  CHECK(scenario_error_line("PART tool tool_cube.mesh 1\nSTEP s tool 0 0 0 1 0 0 0\nWAYPOINT 0 0 0 0 1 0 0 0\n"
                            "WAYPOINT 1 0 0 0 1 0 0 0\nWAYPOINT 1 0 0 0 1 0 0 0\n") == 5);
  CHECK(scenario_error_line("WAYPOINT 0 0 0 0 1 0 0 0\n") == 1);
  CHECK(scenario_error_line("PART tool tool_cube.mesh 1\nCONFIG warp_factor 9\n") == 2);
  CHECK(scenario_error_line("PART tool tool_cube.mesh 1\nCONFIG voxel_size -1\n") == 2);
  CHECK(scenario_error_line("PART tool missing.mesh 1\n") == 1);
  CHECK(scenario_error_line("PART tool tool_cube.mesh 1\nSTEP s tool 0 0 0 2 0 0 0\n") == 2);
  CHECK(scenario_error_line("PART tool tool_cube.mesh 1\nSTEP s tool 0 0 0 1 0 0 0\nWAYPOINT 0 0 0 0 1 0 0 0\n") == 2);
  CHECK_THROWS(load_scenario(kScenarios / "does_not_exist.scn"));
}

TEST_CASE("config keys reach the run configuration") {
  const auto s = parse(std::string(kMinimal) + "CONFIG k_lin 16000\nCONFIG rate_hz 2000\nCONFIG net.peer 127.0.0.1:9\n"
                                               "CONFIG limit.peak_force 25\nCONFIG handle_length 0.25\n");
  CHECK(s.config.render.coupling.k_lin == 16000.0);
  CHECK(s.config.render.coupling.d_lin == doctest::Approx(2.0 * std::sqrt(16000.0 * 0.2)));
  CHECK(s.config.render.coupling.dt == 1.0 / 2000.0);
  CHECK(s.config.net_peer == "127.0.0.1:9");
  CHECK(s.config.limits.peak_force == 25.0);
  CHECK(s.config.handle.length_L == 0.25);
}

TEST_CASE("later steps cook earlier targets into the static map") {
  const auto s = load_scenario(kScenarios / "bracket_on_plate.scn");
  REQUIRE(s.steps.size() == 2);
  CHECK(s.base_parts() == std::vector<std::string>{"plate"});

  const auto first = cooked_parts(s, 0);
  REQUIRE(first.size() == 1);
  const auto second = cooked_parts(s, 1);
  REQUIRE(second.size() == 2);

  const auto map = cook_step_map(s, 1);
  const auto union_map = cook_voxmaps(
      {{s.part("plate").mesh, RigidPose::identity()}, {s.part("bracket").mesh, s.steps[0].target}},
      s.config.voxel_size, s.config.band_width);
  CHECK(same_cells(map, union_map));

  // Independent check against the exhaustive overlap oracle on the same grid.
  const auto merged = merge_meshes(
      {s.part("plate").mesh, transform_mesh(s.part("bracket").mesh, s.steps[0].target)});
  std::vector<std::size_t> surface;
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    if (map.tag(i) == VoxelTag::Surface) surface.push_back(i);
  }
  CHECK(surface == oracle::surface_cells(merged, map.grid()));
  CHECK(map.surface_count() > cook_step_map(s, 0).surface_count());
}

TEST_CASE("trajectory sampling") {
  const Trajectory t({{0.0, RigidPose::identity()},
                      {1.0, RigidPose::from_axis_angle({0, 0, 1}, 1.0, {1, 0, 0})},
                      {3.0, RigidPose::translation({1, 2, 0})}});
  CHECK(t.sample(0.0).position() == Vec3::Zero());
  CHECK((t.sample(0.5).position() - Vec3(0.5, 0, 0)).norm() <= 1e-15);
  CHECK(rotation_angle_between(t.sample(0.5).rotation(), Mat3::Identity()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((t.sample(2.0).position() - Vec3(1, 1, 0)).norm() <= 1e-15);
  CHECK(t.sample(-1.0).position() == Vec3::Zero());
  CHECK(t.sample(10.0).position() == Vec3(1, 2, 0));
  CHECK(t.start() == 0.0);
  CHECK(t.end() == 3.0);
  CHECK_THROWS_AS(Trajectory({{0.0, RigidPose::identity()}}), std::invalid_argument);
  CHECK_THROWS_AS(Trajectory({{0.0, RigidPose::identity()}, {0.0, RigidPose::identity()}}), std::invalid_argument);
}

TEST_CASE("trace writer and reader") {
  CHECK(trace_text({}) == "t,fx,fy,fz,tx,ty,tz,contacts,rate_hz\n");
  std::vector<TraceRow> rows;
  oracle::Gen g(61);
  for (int i = 0; i < 50; ++i) {
    TraceRow r;
    r.t = i / 1600.0;
    if (i % 10 < 4) {
      r.force = g.vec(-30, 30);
      r.torque = g.vec(-1, 1);
      r.contacts = static_cast<std::size_t>(g.integer(1, 40));
    }
    r.rate_hz = 1600.0;
    rows.push_back(r);
  }
  std::istringstream in(trace_text(rows));
  const auto back = read_trace(in);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].t == rows[i].t);
    CHECK(back[i].force == rows[i].force);
    CHECK(back[i].torque == rows[i].torque);
    CHECK(back[i].contacts == rows[i].contacts);
  }
  const auto s = summarize_trace(rows);
  CHECK(s.nonzero_intervals == 5);
  CHECK(s.nonzero_rows == 20);
  std::istringstream bad("t,fx\n");
  CHECK_THROWS(read_trace(bad));
}

TEST_CASE("runs are deterministic and transport independent") {
  const auto s = load_scenario(kScenarios / "impacts.scn");
  const auto a = run_assembly(s);
  const auto b = run_assembly(s);
  RunOptions udp;
  udp.transport = TransportKind::Udp;
  const auto c = run_assembly(s, udp);
  REQUIRE(a.steps.size() == 1);
  const auto ta = trace_text(a.steps[0].trace);
  CHECK(ta == trace_text(b.steps[0].trace));
  CHECK(ta == trace_text(c.steps[0].trace));
  CHECK(a.bytes_transferred == c.bytes_transferred);
  CHECK_FALSE(a.network_load_bps);
  REQUIRE(c.network_load_bps);
  CHECK(*c.network_load_bps == doctest::Approx(c.bytes_transferred * 8.0 / c.simulated_seconds));
  CHECK(summarize_trace(a.steps[0].trace).nonzero_intervals == 7);
  CHECK(a.all_converged());
}

TEST_CASE("trace rows carry the wrench the renderer produced") {
  const auto s = load_scenario(kScenarios / "impacts.scn");
  const auto report = run_assembly(s);
  const auto& trace = report.steps[0].trace;

  // Replay the same frames without the transport; poses still cross the packet conversion.
  const SimulatedDevice device(s.config.handle, s.config.limits);
  const Trajectory traj(s.steps[0].waypoints);
  const auto map = cook_step_map(s, 0);
  const auto shell = build_pointshell(s.part("tool").mesh, s.config.spacing);
  const auto start = device.sense(traj.sample(traj.start())).handle_pose;
  RenderLoop loop(shell, map, s.config.render, ToolState::at_rest(start));
  const double dt = s.config.render.coupling.dt;
  REQUIRE(trace.size() == report.steps[0].frames);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = traj.start() + static_cast<double>(i) * dt;
    const auto pose = proto::to_pose(proto::to_packet(device.sense(traj.sample(t)).handle_pose));
    const auto r = loop.step(pose);
    CHECK(trace[i].t == t);
    CHECK(trace[i].force == r.device_wrench.force);
    CHECK(trace[i].torque == r.device_wrench.torque);
    CHECK(trace[i].contacts == r.stats.contact_count);
  }
}

TEST_CASE("each step starts fresh from its own trajectory") {
  auto s = load_scenario(kScenarios / "bracket_on_plate.scn");
  const auto base = run_assembly(s);
  REQUIRE(base.steps.size() == 2);
  CHECK(base.all_converged());
  auto& first = s.steps[0].waypoints;
  first.insert(first.begin() + 1, Waypoint{0.2, RigidPose::translation({0.08, -0.05, 0.1})});
  const auto altered = run_assembly(s);
  CHECK(trace_text(base.steps[0].trace) != trace_text(altered.steps[0].trace));
  CHECK(trace_text(base.steps[1].trace) == trace_text(altered.steps[1].trace));
  CHECK(summarize_trace(base.steps[1].trace).nonzero_rows > 0);

  RunOptions one;
  one.max_steps = 1;
  CHECK(run_assembly(s, one).steps.size() == 1);
}

TEST_CASE("free-space scenario produces an all-zero trace") {
  const auto report = run_assembly(load_scenario(kScenarios / "free_space.scn"));
  REQUIRE(report.steps.size() == 1);
  const auto sum = summarize_trace(report.steps[0].trace);
  CHECK(sum.rows == report.steps[0].frames);
  CHECK(sum.nonzero_rows == 0);
  CHECK(report.steps[0].surface_voxels == 0);
  CHECK(report.all_converged());
}

TEST_CASE("write_run emits one trace per step and a report") {
  const auto dir = fs::temp_directory_path() / "vhap_write_run";
  fs::remove_all(dir);
  const auto report = run_assembly(load_scenario(kScenarios / "bracket_on_plate.scn"));
  write_run(dir, report);
  CHECK(fs::exists(dir / "place_bracket.csv"));
  CHECK(fs::exists(dir / "place_peg.csv"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(read_trace(dir / "place_peg.csv").size() == report.steps[1].frames);
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  CHECK(run_cli("run " + (kScenarios / "free_space.scn").string()) == 0);
  const auto path = fs::temp_directory_path() / "vhap_unreachable.scn";
  {
    std::ofstream out(path);
    out << "PART tool " << (kMeshes / "tool_cube.mesh").string() << " 1\n"
        << "STEP away tool 0.5 0 0 1 0 0 0\n"
        << "WAYPOINT 0 0 0 0 1 0 0 0\n"
        << "WAYPOINT 0.05 0 0 0 1 0 0 0\n";
  }
  CHECK(run_cli("run " + path.string()) == 2);
  {
    std::ofstream out(path);
    out << "FROB\n";
  }
  CHECK(run_cli("run " + path.string()) == 1);
  CHECK(run_cli("run /nonexistent.scn") == 1);
  CHECK(run_cli("voxelize " + (kMeshes / "plate.mesh").string() + " --voxel-size 0.004") == 0);
  fs::remove(path);
}
