#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>

#include "vhap/harness.hpp"
#include "vhap/transport.hpp"

namespace vhap {

namespace {

using namespace std::chrono_literals;

// Both directions of the device <-> renderer connection.
struct Wiring {
  proto::Link* device_tx = nullptr;
  proto::Link* render_rx = nullptr;
  proto::Link* render_tx = nullptr;
  proto::Link* device_rx = nullptr;
  std::chrono::milliseconds wait{0};
  std::unique_ptr<proto::InProcessChannel> poses, wrenches;
  std::unique_ptr<proto::UdpLink> device_sock, render_sock;
};

Wiring make_wiring(const ScenarioConfig& cfg, const RunOptions& opt) {
  Wiring w;
  if (opt.transport == TransportKind::InProcess) {
    w.poses = proto::shared_channel(cfg.channel_capacity);
    w.wrenches = proto::shared_channel(cfg.channel_capacity);
    w.device_tx = w.render_rx = w.poses.get();
    w.render_tx = w.device_rx = w.wrenches.get();
    return w;
  }
  // The device socket binds to net.bind; the renderer socket lives at
  // net.peer when given, otherwise on an ephemeral loopback port.
  const auto device_addr = proto::parse_address(opt.bind.value_or(cfg.net_bind));
  const std::string peer = opt.peer.value_or(cfg.net_peer);
  const auto render_addr = peer.empty() ? proto::UdpAddress{device_addr.host, 0} : proto::parse_address(peer);
  w.device_sock = std::make_unique<proto::UdpLink>(device_addr);
  w.render_sock = std::make_unique<proto::UdpLink>(render_addr);
  w.device_sock->set_peer(w.render_sock->local_address());
  w.render_sock->set_peer(w.device_sock->local_address());
  w.device_tx = w.device_rx = w.device_sock.get();
  w.render_tx = w.render_rx = w.render_sock.get();
  w.wait = 1000ms;
  return w;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// Delivers datagrams to `on_packet` until it reports the awaited packet
// or the wait expires, then drains whatever else is already pending.
template <typename F>
void pump(proto::Link& link, std::chrono::milliseconds wait, F&& on_packet) {
  bool awaited = false;
  while (!awaited) {
    auto d = link.receive(wait);
    if (!d) break;
    const auto decoded = proto::decode(*d);
    if (const auto* pkt = std::get_if<proto::Decoded>(&decoded)) awaited = on_packet(*pkt);
  }
  while (auto d = link.receive(0ms)) {
    const auto decoded = proto::decode(*d);
    if (const auto* pkt = std::get_if<proto::Decoded>(&decoded)) on_packet(*pkt);
  }
}

std::uint64_t micros(double t) { return static_cast<std::uint64_t>(std::llround(std::max(0.0, t) * 1e6)); }

}  // namespace

bool RunReport::all_converged() const {
  return std::all_of(steps.begin(), steps.end(), [](const StepReport& s) { return s.converged; });
}

RunReport run_assembly(const Scenario& scenario, const RunOptions& options) {
  ScenarioConfig cfg = scenario.config;
  if (options.rate_hz) {
    if (!(*options.rate_hz > 0.0)) throw std::invalid_argument("rate must be > 0");
    cfg.render.coupling.dt = 1.0 / *options.rate_hz;
  }
  const double dt = cfg.render.coupling.dt;
  const double nominal_rate = 1.0 / dt;
  const SimulatedDevice device(cfg.handle, cfg.limits);

  RunReport report;
  report.transport = options.transport;
  Wiring wires = make_wiring(cfg, options);
  std::uint32_t pose_seq = 0;
  std::uint32_t wrench_seq = 0;
  std::uint32_t aux_seq = 0;
  std::size_t bytes = 0;
  std::vector<double> all_rates;

  auto send = [&](proto::Link& link, const proto::Packet& p, std::uint32_t seq, double t) {
    const auto d = proto::encode(p, seq, micros(t));
    bytes += d.size();
    link.send(d);
  };

  const std::size_t step_count = std::min(scenario.steps.size(), options.max_steps.value_or(scenario.steps.size()));
  for (std::size_t k = 0; k < step_count; ++k) {
    const auto& step = scenario.steps[k];
    const Trajectory traj(step.waypoints);
    const VoxMap map = cook_step_map(scenario, k);
    PointShellOptions so;
    so.spacing = cfg.spacing;
    so.point_budget = cfg.point_budget;
    const PointShell shell = build_pointshell(scenario.part(step.active_part).mesh, so);

    StepReport sr;
    sr.name = step.name;
    sr.active_part = step.active_part;
    sr.surface_voxels = map.surface_count();
    sr.pointshell_size = shell.size();

    const RigidPose start = device.sense(traj.sample(traj.start())).handle_pose;
    RenderLoop loop(shell, map, cfg.render, ToolState::at_rest(start));
    RigidPose render_pose = start;
    proto::SeqTracker pose_tracker;
    proto::SeqTracker wrench_tracker;

    send(*wires.device_tx, proto::ConfigPacket{cfg.announced()}, ++aux_seq, traj.start());

    const auto frames = static_cast<std::size_t>(std::floor((traj.end() - traj.start()) / dt + 1e-9)) + 1;
    std::vector<double> rates;
    rates.reserve(frames);
    sr.trace.reserve(frames);
    for (std::size_t i = 0; i < frames; ++i) {
      const double t = traj.start() + static_cast<double>(i) * dt;
      const RigidPose handle = traj.sample(t);
      const DeviceReading reading = device.sense(handle);
      send(*wires.device_tx, proto::to_packet(reading.handle_pose), ++pose_seq, t);

      // Renderer side: newest valid pose wins; stale or lost poses keep
      // the previous one.
      pump(*wires.render_rx, wires.wait, [&](const proto::Decoded& pkt) {
        const auto* pose = std::get_if<proto::PosePacket>(&pkt.packet);
        if (!pose) return false;
        if (pose_tracker.accept(pkt.header.seq)) render_pose = proto::to_pose(*pose);
        return pkt.header.seq == pose_seq;
      });
      const auto r = loop.step(render_pose);
      if (r.stats.deep_penetration) ++sr.deep_penetration_frames;
      rates.push_back(r.stats.step_time_ns > 0 ? 1e9 / static_cast<double>(r.stats.step_time_ns) : 0.0);
      send(*wires.render_tx, proto::to_packet(r.device_wrench), ++wrench_seq, t);

      // Device side: apply the delivered wrench through statics and limits.
      TraceRow row;
      row.t = t;
      row.contacts = r.stats.contact_count;
      row.rate_hz = nominal_rate;
      pump(*wires.device_rx, wires.wait, [&](const proto::Decoded& pkt) {
        const auto* w = std::get_if<proto::WrenchPacket>(&pkt.packet);
        if (!w || !wrench_tracker.accept(pkt.header.seq)) return false;
        const Wrench delivered = proto::to_wrench(*w, handle.position());
        const auto cmd = device.actuate(delivered, reading.handle_pose);
        if (cmd.force_clamped || cmd.torque_clamped) ++sr.saturated_frames;
        row.force = delivered.force;
        row.torque = delivered.torque;
        return pkt.header.seq == wrench_seq;
      });
      sr.trace.push_back(row);
    }

    sr.frames = frames;
    sr.median_rate_hz = median(rates);
    sr.min_rate_hz = rates.empty() ? 0.0 : *std::min_element(rates.begin(), rates.end());
    all_rates.insert(all_rates.end(), rates.begin(), rates.end());
    const RigidPose& final_pose = loop.state().pose;
    sr.position_error = (final_pose.position() - step.target.position()).norm();
    sr.angle_error = rotation_angle_between(final_pose.rotation(), step.target.rotation());
    sr.converged = sr.position_error <= cfg.position_tolerance() && sr.angle_error <= cfg.ang_tol;
    if (sr.deep_penetration_frames > 0) {
      std::clog << "step " << step.name << ": deep penetration in " << sr.deep_penetration_frames << " frames\n";
    }

    const auto state = sr.converged ? proto::RunState::Converged : proto::RunState::NotConverged;
    send(*wires.render_tx, proto::StatusPacket{static_cast<std::uint8_t>(state), sr.median_rate_hz}, ++aux_seq,
         traj.end());
    pump(*wires.device_rx, wires.wait,
         [](const proto::Decoded& pkt) { return std::holds_alternative<proto::StatusPacket>(pkt.packet); });
    report.simulated_seconds += static_cast<double>(frames) * dt;
    report.steps.push_back(std::move(sr));
  }

  report.median_rate_hz = median(all_rates);
  report.min_rate_hz = all_rates.empty() ? 0.0 : *std::min_element(all_rates.begin(), all_rates.end());
  report.bytes_transferred = bytes;
  if (options.transport == TransportKind::Udp && report.simulated_seconds > 0.0) {
    report.network_load_bps = static_cast<double>(bytes) * 8.0 / report.simulated_seconds;
  }
  return report;
}

}  // namespace vhap
