// Command-line front end: scenario runs, voxelization, render benchmark,
// trace inspection and standalone UDP endpoints.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

#include "vhap/harness.hpp"
#include "vhap/transport.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct RunArgs {
  std::string scenario;
  std::string transport = "inproc";
  std::string out;
  std::string bind;
  std::string peer;
  double rate_hz = 0.0;
  std::size_t steps = 0;
};

int cmd_run(const RunArgs& a) {
  const auto scenario = vhap::load_scenario(a.scenario);
  vhap::RunOptions opt;
  opt.transport = a.transport == "udp" ? vhap::TransportKind::Udp : vhap::TransportKind::InProcess;
  if (!a.bind.empty()) opt.bind = a.bind;
  if (!a.peer.empty()) opt.peer = a.peer;
  if (a.rate_hz > 0.0) opt.rate_hz = a.rate_hz;
  if (a.steps > 0) opt.max_steps = a.steps;
  const auto report = vhap::run_assembly(scenario, opt);
  if (!a.out.empty()) vhap::write_run(a.out, report);
  vhap::write_report(std::cout, report);
  return report.all_converged() ? kExitOk : kExitNotConverged;
}

struct VoxelizeArgs {
  std::string mesh;
  double voxel_size = 0.005;
  double band = 0.0;
  double scale = 1.0;
  double spacing = 0.0;
  std::string dump;
};

int cmd_voxelize(const VoxelizeArgs& a) {
  const auto mesh = vhap::load_mesh(a.mesh, a.scale);
  const auto map = vhap::voxelize_surface(mesh, a.voxel_size, a.band);
  const auto& d = map.dims();
  std::cout << "triangles " << mesh.triangles.size() << '\n'
            << "grid " << d[0] << ' ' << d[1] << ' ' << d[2] << '\n'
            << "surface " << map.surface_count() << '\n'
            << "interior " << map.count(vhap::VoxelTag::Interior) << '\n'
            << "proximity " << map.count(vhap::VoxelTag::Proximity) << '\n';
  if (a.spacing > 0.0) std::cout << "pointshell " << vhap::build_pointshell(mesh, a.spacing).size() << '\n';
  if (!a.dump.empty()) {
    std::ofstream out(a.dump);
    if (!out) throw std::runtime_error("cannot write " + a.dump);
    vhap::write_voxmap_dump(out, map);
  }
  return kExitOk;
}

struct BenchArgs {
  std::size_t voxels = 185030;
  std::size_t points = 5000;
  double seconds = 2.0;
};

int cmd_bench(const BenchArgs& a) {
  vhap::BenchSceneOptions o;
  o.target_voxels = a.voxels;
  o.min_points = a.points;
  const auto scene = vhap::make_bench_scene(o);
  const auto r = vhap::run_render_bench(scene, a.seconds);
  std::cout << "voxel_size " << scene.voxel_size << '\n'
            << "surface_voxels " << scene.map.surface_count() << '\n'
            << "pointshell " << scene.shell.size() << '\n'
            << "steps " << r.steps << '\n'
            << "mean_contacts " << r.mean_contacts << '\n'
            << "min_contacts " << r.min_contacts << '\n'
            << "median_rate_hz " << r.median_rate_hz << '\n'
            << "min_rate_hz " << r.min_rate_hz << '\n';
  return kExitOk;
}

int cmd_inspect(const std::string& path) {
  const auto s = vhap::summarize_trace(vhap::read_trace(std::filesystem::path(path)));
  std::cout << "rows " << s.rows << '\n'
            << "duration " << s.duration << '\n'
            << "peak_force " << s.peak_force << '\n'
            << "peak_torque " << s.peak_torque << '\n'
            << "nonzero_rows " << s.nonzero_rows << '\n'
            << "nonzero_intervals " << s.nonzero_intervals << '\n'
            << "max_contacts " << s.max_contacts << '\n';
  return kExitOk;
}

struct EndpointArgs {
  std::string role;
  std::string bind = "127.0.0.1:0";
  std::string peer;
  double rate_hz = 1000.0;
  double seconds = 0.0;
};

int cmd_endpoint(const EndpointArgs& a) {
  using namespace vhap::proto;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const bool publish = a.role == "publish";
  if (publish && a.peer.empty()) throw std::invalid_argument("publish needs --peer");
  UdpLink link(parse_address(a.bind));
  if (!a.peer.empty()) link.set_peer(parse_address(a.peer));
  std::cerr << "endpoint " << a.role << " on " << link.local_address().to_string() << '\n';

  EndpointConfig cfg;
  cfg.role = publish ? Role::Publisher : Role::Subscriber;
  cfg.rate_hz = a.rate_hz;
  cfg.duration = std::chrono::duration<double>(a.seconds);
  LinkCounters counters;
  // Publishes a slow circle so a subscriber sees changing poses.
  const PacketSource source = [](std::uint32_t, double t) {
    return Packet{to_packet(vhap::RigidPose::translation({0.05 * std::cos(t), 0.05 * std::sin(t), 0.0}))};
  };
  const auto s = run_endpoint(cfg, link, source, {}, counters, g_stop);
  std::cout << "packets_sent " << s.packets_sent << '\n'
            << "packets_received " << s.packets_received << '\n'
            << "bytes_sent " << s.bytes_sent << '\n'
            << "bytes_received " << s.bytes_received << '\n'
            << "drops_detected " << s.drops_detected << '\n'
            << "decode_errors " << s.decode_errors << '\n'
            << "measured_rate_hz " << s.measured_rate << '\n'
            << "measured_load_bps " << s.measured_load << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volumetric haptic assembly engine"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Replay an assembly scenario and report traces and rates");
  run_cmd->add_option("scenario", run.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--transport", run.transport, "inproc or udp")->check(CLI::IsMember({"inproc", "udp"}));
  run_cmd->add_option("--out", run.out, "Directory for <step>.csv traces and report.txt");
  run_cmd->add_option("--bind", run.bind, "Device socket address host:port (udp)");
  run_cmd->add_option("--peer", run.peer, "Renderer socket address host:port (udp)");
  run_cmd->add_option("--rate-hz", run.rate_hz, "Render rate override")->check(CLI::PositiveNumber);
  run_cmd->add_option("--steps", run.steps, "Run only the first N steps");

  VoxelizeArgs vox;
  auto* vox_cmd = app.add_subcommand("voxelize", "Voxelize a mesh and print cell counts");
  vox_cmd->add_option("mesh", vox.mesh, "Mesh file")->required()->check(CLI::ExistingFile);
  vox_cmd->add_option("--voxel-size", vox.voxel_size, "Cell edge in meters")->check(CLI::PositiveNumber);
  vox_cmd->add_option("--band", vox.band, "Proximity band width in meters")->check(CLI::NonNegativeNumber);
  vox_cmd->add_option("--scale", vox.scale, "Unit scale applied to the file")->check(CLI::PositiveNumber);
  vox_cmd->add_option("--spacing", vox.spacing, "Also build a pointshell at this spacing");
  vox_cmd->add_option("--dump", vox.dump, "Write the cell map as text");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Render-loop rate on the plate benchmark scene");
  bench_cmd->add_option("--voxels", bench.voxels, "Target surface voxel count");
  bench_cmd->add_option("--points", bench.points, "Minimum pointshell size");
  bench_cmd->add_option("--seconds", bench.seconds, "Wall time to run")->check(CLI::PositiveNumber);

  std::string trace;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a force trace");
  inspect_cmd->add_option("trace", trace, "Trace CSV")->required()->check(CLI::ExistingFile);

  EndpointArgs ep;
  auto* ep_cmd = app.add_subcommand("endpoint", "Standalone UDP pose publisher or subscriber");
  ep_cmd->add_option("role", ep.role, "publish or subscribe")->required()->check(CLI::IsMember({"publish", "subscribe"}));
  ep_cmd->add_option("--bind", ep.bind, "Local address host:port");
  ep_cmd->add_option("--peer", ep.peer, "Destination address host:port");
  ep_cmd->add_option("--rate-hz", ep.rate_hz, "Publish rate")->check(CLI::PositiveNumber);
  ep_cmd->add_option("--seconds", ep.seconds, "Run time; 0 runs until interrupted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*vox_cmd) return cmd_voxelize(vox);
    if (*bench_cmd) return cmd_bench(bench);
    if (*inspect_cmd) return cmd_inspect(trace);
    if (*ep_cmd) return cmd_endpoint(ep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
