#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vhap/harness.hpp"

namespace vhap {

namespace {

constexpr const char* kTraceHeader = "t,fx,fy,fz,tx,ty,tz,contacts,rate_hz";

// Shortest round-trip representation; identical bits give identical text.
void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

double parse_field(const std::string& s, int line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("trace line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

bool nonzero(const TraceRow& r) { return !r.force.isZero(0.0) || !r.torque.isZero(0.0); }

}  // namespace

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    put(out, r.t);
    for (int a = 0; a < 3; ++a) {
      out << ',';
      put(out, r.force[a]);
    }
    for (int a = 0; a < 3; ++a) {
      out << ',';
      put(out, r.torque[a]);
    }
    out << ',' << r.contacts << ',';
    put(out, r.rate_hz);
    out << '\n';
  }
}

void write_trace(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace(out, rows);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_report(std::ostream& out, const RunReport& report) {
  out << "transport " << (report.transport == TransportKind::Udp ? "udp" : "inproc") << '\n';
  out << "steps " << report.steps.size() << '\n';
  for (const auto& s : report.steps) {
    out << "step " << s.name << " active " << s.active_part << " surface_voxels " << s.surface_voxels
        << " pointshell " << s.pointshell_size << " frames " << s.frames << " median_rate_hz " << s.median_rate_hz
        << " min_rate_hz " << s.min_rate_hz << " pos_error " << s.position_error << " ang_error " << s.angle_error
        << " deep_frames " << s.deep_penetration_frames << " saturated_frames " << s.saturated_frames << ' '
        << (s.converged ? "CONVERGED" : "NOT_CONVERGED") << '\n';
  }
  out << "median_step_rate_hz " << report.median_rate_hz << '\n';
  out << "min_step_rate_hz " << report.min_rate_hz << '\n';
  std::size_t voxels = 0;
  std::size_t points = 0;
  for (const auto& s : report.steps) {
    voxels = std::max(voxels, s.surface_voxels);
    points = std::max(points, s.pointshell_size);
  }
  out << "max_surface_voxels " << voxels << '\n';
  out << "max_pointshell_size " << points << '\n';
  out << "simulated_seconds " << report.simulated_seconds << '\n';
  out << "bytes_transferred " << report.bytes_transferred << '\n';
  if (report.network_load_bps) out << "network_load_bps " << *report.network_load_bps << '\n';
  out << "converged " << (report.all_converged() ? "all" : "partial") << '\n';
}

void write_run(const std::filesystem::path& dir, const RunReport& report) {
  std::filesystem::create_directories(dir);
  for (const auto& s : report.steps) write_trace(dir / (s.name + ".csv"), s.trace);
  std::ofstream out(dir / "report.txt");
  if (!out) throw std::runtime_error("cannot write " + (dir / "report.txt").string());
  write_report(out, report);
}

std::vector<TraceRow> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw std::runtime_error("trace: missing header");
  std::vector<TraceRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw std::runtime_error("trace line " + std::to_string(n) + ": expected 9 fields");
    TraceRow r;
    r.t = parse_field(f[0], n);
    for (int a = 0; a < 3; ++a) r.force[a] = parse_field(f[1 + static_cast<std::size_t>(a)], n);
    for (int a = 0; a < 3; ++a) r.torque[a] = parse_field(f[4 + static_cast<std::size_t>(a)], n);
    r.contacts = static_cast<std::size_t>(parse_field(f[7], n));
    r.rate_hz = parse_field(f[8], n);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace(in);
}

TraceSummary summarize_trace(const std::vector<TraceRow>& rows) {
  TraceSummary s;
  s.rows = rows.size();
  if (!rows.empty()) s.duration = rows.back().t - rows.front().t;
  bool prev = false;
  for (const auto& r : rows) {
    s.peak_force = std::max(s.peak_force, r.force.norm());
    s.peak_torque = std::max(s.peak_torque, r.torque.norm());
    s.max_contacts = std::max(s.max_contacts, r.contacts);
    const bool nz = nonzero(r);
    if (nz) ++s.nonzero_rows;
    if (nz && !prev) ++s.nonzero_intervals;
    prev = nz;
  }
  return s;
}

}  // namespace vhap
