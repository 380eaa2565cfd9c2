#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "vhap/harness.hpp"

namespace vhap {

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> words;
  for (std::string w; ss >> w;) words.push_back(w);
  return words;
}

double number(const std::string& text, int line, const std::string& what) {
  double v = 0.0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) throw ScenarioError("bad " + what + " '" + text + "'", line);
  return v;
}

RigidPose pose_from(const std::vector<std::string>& w, std::size_t first, int line) {
  Vec3 p;
  for (int a = 0; a < 3; ++a) p[a] = number(w[first + static_cast<std::size_t>(a)], line, "coordinate");
  double q[4];
  for (int a = 0; a < 4; ++a) q[a] = number(w[first + 3 + static_cast<std::size_t>(a)], line, "quaternion component");
  const Quat quat(q[0], q[1], q[2], q[3]);
  if (std::abs(quat.norm() - 1.0) > 1e-3) throw ScenarioError("quaternion is not unit length", line);
  return RigidPose::from_quaternion(quat, p);
}

const std::map<std::string, std::function<void(ScenarioConfig&, double)>>& numeric_keys() {
  static const std::map<std::string, std::function<void(ScenarioConfig&, double)>> keys = {
      {"voxel_size", [](ScenarioConfig& c, double v) { c.voxel_size = v; }},
      {"band_width", [](ScenarioConfig& c, double v) { c.band_width = v; }},
      {"spacing", [](ScenarioConfig& c, double v) { c.spacing = v; }},
      {"cell_budget", [](ScenarioConfig& c, double v) { c.cell_budget = static_cast<std::size_t>(v); }},
      {"point_budget", [](ScenarioConfig& c, double v) { c.point_budget = static_cast<std::size_t>(v); }},
      {"k_penalty", [](ScenarioConfig& c, double v) { c.render.k_penalty = v; }},
      {"stability_bound", [](ScenarioConfig& c, double v) { c.render.stability_bound = v; }},
      {"k_lin", [](ScenarioConfig& c, double v) { c.render.coupling.k_lin = v; }},
      {"d_lin", [](ScenarioConfig& c, double v) { c.render.coupling.d_lin = v; }},
      {"k_ang", [](ScenarioConfig& c, double v) { c.render.coupling.k_ang = v; }},
      {"d_ang", [](ScenarioConfig& c, double v) { c.render.coupling.d_ang = v; }},
      {"max_force", [](ScenarioConfig& c, double v) { c.render.coupling.max_force = v; }},
      {"max_torque", [](ScenarioConfig& c, double v) { c.render.coupling.max_torque = v; }},
      {"dt", [](ScenarioConfig& c, double v) { c.render.coupling.dt = v; }},
      {"rate_hz", [](ScenarioConfig& c, double v) { c.render.coupling.dt = 1.0 / v; }},
      {"tool_mass", [](ScenarioConfig& c, double v) { c.render.coupling.tool_mass = v; }},
      {"tool_inertia", [](ScenarioConfig& c, double v) { c.render.coupling.tool_inertia = v; }},
      {"handle_length", [](ScenarioConfig& c, double v) { c.handle.length_L = v; }},
      {"pos_tol", [](ScenarioConfig& c, double v) { c.pos_tol = v; }},
      {"ang_tol", [](ScenarioConfig& c, double v) { c.ang_tol = v; }},
      {"channel_capacity", [](ScenarioConfig& c, double v) { c.channel_capacity = static_cast<std::size_t>(v); }},
      {"limit.peak_force", [](ScenarioConfig& c, double v) { c.limits.peak_force = v; }},
      {"limit.continuous_force", [](ScenarioConfig& c, double v) { c.limits.continuous_force = v; }},
      {"limit.peak_torque", [](ScenarioConfig& c, double v) { c.limits.typ_peak_torque = v; }},
      {"limit.continuous_torque", [](ScenarioConfig& c, double v) { c.limits.typ_cont_torque = v; }},
  };
  return keys;
}

}  // namespace

std::vector<std::pair<std::string, double>> ScenarioConfig::announced() const {
  const auto& c = render.coupling;
  return {{"voxel_size", voxel_size}, {"band_width", band_width}, {"spacing", spacing},
          {"k_penalty", render.k_penalty}, {"k_lin", c.k_lin}, {"d_lin", c.d_lin},
          {"k_ang", c.k_ang}, {"d_ang", c.d_ang}, {"max_force", c.max_force},
          {"max_torque", c.max_torque}, {"dt", c.dt}};
}

const ScenarioPart& Scenario::part(const std::string& name) const {
  for (const auto& p : parts) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no part named " + name);
}

std::vector<std::string> Scenario::base_parts() const {
  std::set<std::string> active;
  for (const auto& s : steps) active.insert(s.active_part);
  std::vector<std::string> base;
  for (const auto& p : parts) {
    if (!active.count(p.name)) base.push_back(p.name);
  }
  return base;
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  Scenario s;
  bool d_lin_set = false;
  bool d_ang_set = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const auto w = split_words(raw);
    if (w.empty()) continue;
    const std::string& d = w[0];
    if (d == "PART") {
      if (w.size() != 4) throw ScenarioError("PART expects: name path scale", line);
      for (const auto& p : s.parts) {
        if (p.name == w[1]) throw ScenarioError("duplicate part '" + w[1] + "'", line);
      }
      ScenarioPart p;
      p.name = w[1];
      p.path = base_dir / w[2];
      p.scale = number(w[3], line, "scale");
      p.line = line;
      if (!(p.scale > 0.0)) throw ScenarioError("scale must be > 0", line);
      try {
        p.mesh = load_mesh(p.path, p.scale);
      } catch (const std::exception& e) {
        throw ScenarioError("part '" + p.name + "': " + e.what(), line);
      }
      s.parts.push_back(std::move(p));
    } else if (d == "CONFIG") {
      if (w.size() != 3) throw ScenarioError("CONFIG expects: key value", line);
      const std::string& key = w[1];
      if (key == "net.bind") {
        s.config.net_bind = w[2];
      } else if (key == "net.peer") {
        s.config.net_peer = w[2];
      } else {
        const auto it = numeric_keys().find(key);
        if (it == numeric_keys().end()) throw ScenarioError("unknown CONFIG key '" + key + "'", line);
        const double v = number(w[2], line, "value for " + key);
        if (!(v > 0.0) && key != "d_lin" && key != "d_ang") throw ScenarioError(key + " must be > 0", line);
        if (v < 0.0) throw ScenarioError(key + " must be >= 0", line);
        it->second(s.config, v);
        d_lin_set = d_lin_set || key == "d_lin";
        d_ang_set = d_ang_set || key == "d_ang";
      }
    } else if (d == "STEP") {
      if (w.size() != 10) throw ScenarioError("STEP expects: name active_part tx ty tz qw qx qy qz", line);
      ScenarioStep st;
      st.name = w[1];
      st.active_part = w[2];
      st.target = pose_from(w, 3, line);
      st.line = line;
      for (const auto& other : s.steps) {
        if (other.name == st.name) throw ScenarioError("duplicate step '" + st.name + "'", line);
      }
      s.steps.push_back(std::move(st));
    } else if (d == "WAYPOINT") {
      if (s.steps.empty()) throw ScenarioError("WAYPOINT before any STEP", line);
      if (w.size() != 9) throw ScenarioError("WAYPOINT expects: t tx ty tz qw qx qy qz", line);
      Waypoint wp;
      wp.t = number(w[1], line, "time");
      wp.pose = pose_from(w, 2, line);
      auto& wps = s.steps.back().waypoints;
      if (!wps.empty() && !(wp.t > wps.back().t)) throw ScenarioError("waypoint times must strictly increase", line);
      wps.push_back(wp);
    } else {
      throw ScenarioError("unknown directive '" + d + "'", line);
    }
  }

  for (const auto& st : s.steps) {
    bool found = false;
    for (const auto& p : s.parts) found = found || p.name == st.active_part;
    if (!found) throw ScenarioError("step '" + st.name + "' references unknown part '" + st.active_part + "'", st.line);
    if (st.waypoints.size() < 2) throw ScenarioError("step '" + st.name + "' needs at least two waypoints", st.line);
  }

  auto& c = s.config.render.coupling;
  if (!d_lin_set) c.d_lin = 2.0 * std::sqrt(c.k_lin * c.tool_mass);
  if (!d_ang_set) c.d_ang = 2.0 * std::sqrt(c.k_ang * c.tool_inertia);
  try {
    c.validate();
    s.config.handle.validate();
    s.config.limits.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(e.what(), line);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path.string());
  Scenario s = parse_scenario(in, path.parent_path());
  s.source = path;
  return s;
}

std::vector<PosedPart> cooked_parts(const Scenario& s, std::size_t k) {
  std::vector<PosedPart> out;
  for (const auto& name : s.base_parts()) out.push_back({s.part(name).mesh, RigidPose::identity()});
  for (std::size_t j = 0; j < k && j < s.steps.size(); ++j) {
    out.push_back({s.part(s.steps[j].active_part).mesh, s.steps[j].target});
  }
  return out;
}

VoxMap cook_step_map(const Scenario& s, std::size_t k, Exec exec) {
  const auto parts = cooked_parts(s, k);
  if (parts.empty()) return {};
  VoxelizeOptions o;
  o.voxel_size = s.config.voxel_size;
  o.band_width = s.config.band_width;
  o.cell_budget = s.config.cell_budget;
  o.exec = exec;
  return cook_voxmaps(parts, o);
}

}  // namespace vhap
