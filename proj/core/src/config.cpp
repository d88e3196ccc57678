#include "tbt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tbt {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on")
    return true;
  if (value == "false" || value == "0" || value == "no" || value == "off")
    return false;
  throw ConfigError("bad boolean value for " + key + ": " + value);
}

using Setter = std::function<void(RunConfig&, const std::string& key,
                                  const std::string& value)>;

Setter set_double(double RunConfig::* field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_double(k, v);
  };
}

Setter set_bool(bool RunConfig::* field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_bool(k, v);
  };
}

Setter set_string(std::string RunConfig::* field) {
  return [field](RunConfig& c, const std::string&, const std::string& v) {
    c.*field = v;
  };
}

template <typename Outer, typename Inner>
Setter set_nested(Outer RunConfig::* outer, Inner Outer::* inner) {
  return [outer, inner](RunConfig& c, const std::string& k,
                        const std::string& v) {
    if constexpr (std::is_same_v<Inner, double>)
      c.*outer.*inner = parse_double(k, v);
    else if constexpr (std::is_same_v<Inner, bool>)
      c.*outer.*inner = parse_bool(k, v);
    else if constexpr (std::is_same_v<Inner, int>)
      c.*outer.*inner = static_cast<int>(parse_double(k, v));
  };
}

template <typename Inner>
Setter set_axis(AxisProfile OperatorProfile::* axis, Inner AxisProfile::* f) {
  return [axis, f](RunConfig& c, const std::string& k, const std::string& v) {
    c.operator_profile.*axis.*f = parse_double(k, v);
  };
}

template <typename Inner>
Setter set_wall(AxisWall WallModel::* axis, Inner AxisWall::* f) {
  return [axis, f](RunConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_same_v<Inner, bool>)
      c.wall.*axis.*f = parse_bool(k, v);
    else if constexpr (std::is_same_v<Inner, int>)
      c.wall.*axis.*f = static_cast<int>(parse_double(k, v));
    else
      c.wall.*axis.*f = parse_double(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scenario.name",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.scenario = scenario_from_name(v);
       }},
      {"scenario.mode",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "plaintext")
           c.mode = AttackMode::kPlaintext;
         else if (v == "ciphertext")
           c.mode = AttackMode::kCiphertext;
         else
           throw ConfigError("bad value for " + k + ": " + v);
       }},
      {"scenario.seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_u64(k, v);
       }},
      {"scenario.duration", set_double(&RunConfig::duration)},
      {"scenario.tick_period", set_double(&RunConfig::tick_period)},
      {"scenario.dt_phys", set_double(&RunConfig::dt_phys)},
      {"scenario.onset_time", set_double(&RunConfig::onset_time)},
      {"scenario.pitch_lock", set_bool(&RunConfig::pitch_lock)},
      {"scenario.divergence_bound", set_double(&RunConfig::divergence_bound)},

      {"params.point_mass",
       set_nested(&RunConfig::params, &ManipulatorParams::point_mass)},
      {"params.link_length",
       set_nested(&RunConfig::params, &ManipulatorParams::link_length)},
      {"params.yaw_inertia",
       set_nested(&RunConfig::params, &ManipulatorParams::yaw_inertia)},
      {"params.gravity",
       set_nested(&RunConfig::params, &ManipulatorParams::gravity)},
      {"params.viscous_friction1",
       set_nested(&RunConfig::params, &ManipulatorParams::viscous_friction1)},
      {"params.viscous_friction2",
       set_nested(&RunConfig::params, &ManipulatorParams::viscous_friction2)},

      {"gains.kp1", set_nested(&RunConfig::gains, &ControllerGains::kp1)},
      {"gains.kp2", set_nested(&RunConfig::gains, &ControllerGains::kp2)},
      {"gains.kd1", set_nested(&RunConfig::gains, &ControllerGains::kd1)},
      {"gains.kd2", set_nested(&RunConfig::gains, &ControllerGains::kd2)},
      {"gains.kf1", set_nested(&RunConfig::gains, &ControllerGains::kf1)},
      {"gains.kf2", set_nested(&RunConfig::gains, &ControllerGains::kf2)},

      {"encoding.gamma",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.gamma = static_cast<unsigned>(parse_u64(k, v));
       }},

      {"keys.bits",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.key_bits = static_cast<unsigned>(parse_u64(k, v));
       }},
      {"keys.file", set_string(&RunConfig::key_file)},

      {"controller.observer_cutoff", set_double(&RunConfig::observer_cutoff)},
      {"controller.gravity_comp_leader",
       set_bool(&RunConfig::gravity_comp_leader)},
      {"controller.gravity_comp_follower",
       set_bool(&RunConfig::gravity_comp_follower)},

      {"initial.leader_theta1",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.leader_ic.theta1 = parse_double(k, v);
       }},
      {"initial.leader_theta2",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.leader_ic.theta2 = parse_double(k, v);
       }},
      {"initial.follower_theta1",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.follower_ic.theta1 = parse_double(k, v);
       }},
      {"initial.follower_theta2",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.follower_ic.theta2 = parse_double(k, v);
       }},

      {"transport.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "loopback")
           c.transport = Transport::kLoopback;
         else if (v == "udp")
           c.transport = Transport::kUdp;
         else
           throw ConfigError("bad value for " + k + ": " + v);
       }},
      {"transport.base_delay",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.latency.base_delay = parse_double(k, v);
       }},
      {"transport.jitter",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.latency.jitter = parse_double(k, v);
       }},
      {"transport.drop_rate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.latency.drop_rate = parse_double(k, v);
       }},
      {"transport.leader_addr", set_string(&RunConfig::leader_addr)},
      {"transport.follower_addr", set_string(&RunConfig::follower_addr)},
      {"transport.proxy_leader_addr",
       set_string(&RunConfig::proxy_leader_addr)},
      {"transport.proxy_follower_addr",
       set_string(&RunConfig::proxy_follower_addr)},

      {"operator.stiffness",
       set_nested(&RunConfig::operator_profile, &OperatorProfile::stiffness)},
      {"operator.damping",
       set_nested(&RunConfig::operator_profile, &OperatorProfile::damping)},
      {"operator.yaw_amplitude",
       set_axis(&OperatorProfile::yaw, &AxisProfile::amplitude)},
      {"operator.yaw_period",
       set_axis(&OperatorProfile::yaw, &AxisProfile::period)},
      {"operator.yaw_start",
       set_axis(&OperatorProfile::yaw, &AxisProfile::start)},
      {"operator.yaw_stop", set_axis(&OperatorProfile::yaw, &AxisProfile::stop)},
      {"operator.pitch_amplitude",
       set_axis(&OperatorProfile::pitch, &AxisProfile::amplitude)},
      {"operator.pitch_period",
       set_axis(&OperatorProfile::pitch, &AxisProfile::period)},
      {"operator.pitch_start",
       set_axis(&OperatorProfile::pitch, &AxisProfile::start)},
      {"operator.pitch_stop",
       set_axis(&OperatorProfile::pitch, &AxisProfile::stop)},

      {"wall.yaw_enabled", set_wall(&WallModel::yaw, &AxisWall::enabled)},
      {"wall.yaw_angle", set_wall(&WallModel::yaw, &AxisWall::angle)},
      {"wall.yaw_stiffness", set_wall(&WallModel::yaw, &AxisWall::stiffness)},
      {"wall.yaw_damping", set_wall(&WallModel::yaw, &AxisWall::damping)},
      {"wall.yaw_side", set_wall(&WallModel::yaw, &AxisWall::side)},
      {"wall.pitch_enabled", set_wall(&WallModel::pitch, &AxisWall::enabled)},
      {"wall.pitch_angle", set_wall(&WallModel::pitch, &AxisWall::angle)},
      {"wall.pitch_stiffness",
       set_wall(&WallModel::pitch, &AxisWall::stiffness)},
      {"wall.pitch_damping", set_wall(&WallModel::pitch, &AxisWall::damping)},
      {"wall.pitch_side", set_wall(&WallModel::pitch, &AxisWall::side)},
  };
  return table;
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& dotted_key,
                        const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(dotted_key);
  if (it == table.end()) throw ConfigError("unknown config key: " + dotted_key);
  it->second(cfg, dotted_key, value);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos) {
      if (section.empty())
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": key outside any section: " + key);
      key = section + "." + key;
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string show_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  const auto onoff = [](bool b) { return b ? "true" : "false"; };

  out << "scenario.name = " << to_string(cfg.scenario) << "\n";
  out << "scenario.mode = "
      << (cfg.mode == AttackMode::kPlaintext ? "plaintext" : "ciphertext")
      << "\n";
  out << "scenario.seed = " << cfg.seed << "\n";
  out << "scenario.duration = " << num(cfg.duration) << "\n";
  out << "scenario.tick_period = " << num(cfg.tick_period) << "\n";
  out << "scenario.dt_phys = " << num(cfg.dt_phys) << "\n";
  out << "scenario.onset_time = " << num(cfg.onset_time) << "\n";
  out << "scenario.pitch_lock = " << onoff(cfg.pitch_lock) << "\n";
  out << "scenario.divergence_bound = " << num(cfg.divergence_bound) << "\n";

  out << "params.point_mass = " << num(cfg.params.point_mass) << "\n";
  out << "params.link_length = " << num(cfg.params.link_length) << "\n";
  out << "params.yaw_inertia = " << num(cfg.params.yaw_inertia) << "\n";
  out << "params.gravity = " << num(cfg.params.gravity) << "\n";
  out << "params.viscous_friction1 = " << num(cfg.params.viscous_friction1)
      << "\n";
  out << "params.viscous_friction2 = " << num(cfg.params.viscous_friction2)
      << "\n";

  out << "gains.kp1 = " << num(cfg.gains.kp1) << "\n";
  out << "gains.kp2 = " << num(cfg.gains.kp2) << "\n";
  out << "gains.kd1 = " << num(cfg.gains.kd1) << "\n";
  out << "gains.kd2 = " << num(cfg.gains.kd2) << "\n";
  out << "gains.kf1 = " << num(cfg.gains.kf1) << "\n";
  out << "gains.kf2 = " << num(cfg.gains.kf2) << "\n";

  out << "encoding.gamma = " << cfg.gamma << "\n";
  out << "keys.bits = " << cfg.key_bits << "\n";
  if (!cfg.key_file.empty()) out << "keys.file = " << cfg.key_file << "\n";

  out << "controller.observer_cutoff = " << num(cfg.observer_cutoff) << "\n";
  out << "controller.gravity_comp_leader = " << onoff(cfg.gravity_comp_leader)
      << "\n";
  out << "controller.gravity_comp_follower = "
      << onoff(cfg.gravity_comp_follower) << "\n";

  out << "initial.leader_theta1 = " << num(cfg.leader_ic.theta1) << "\n";
  out << "initial.leader_theta2 = " << num(cfg.leader_ic.theta2) << "\n";
  out << "initial.follower_theta1 = " << num(cfg.follower_ic.theta1) << "\n";
  out << "initial.follower_theta2 = " << num(cfg.follower_ic.theta2) << "\n";

  out << "transport.kind = "
      << (cfg.transport == Transport::kLoopback ? "loopback" : "udp") << "\n";
  out << "transport.base_delay = " << num(cfg.latency.base_delay) << "\n";
  out << "transport.jitter = " << num(cfg.latency.jitter) << "\n";
  out << "transport.drop_rate = " << num(cfg.latency.drop_rate) << "\n";
  out << "transport.leader_addr = " << cfg.leader_addr << "\n";
  out << "transport.follower_addr = " << cfg.follower_addr << "\n";
  out << "transport.proxy_leader_addr = " << cfg.proxy_leader_addr << "\n";
  out << "transport.proxy_follower_addr = " << cfg.proxy_follower_addr << "\n";

  out << "operator.stiffness = " << num(cfg.operator_profile.stiffness) << "\n";
  out << "operator.damping = " << num(cfg.operator_profile.damping) << "\n";
  out << "operator.yaw_amplitude = " << num(cfg.operator_profile.yaw.amplitude)
      << "\n";
  out << "operator.yaw_period = " << num(cfg.operator_profile.yaw.period)
      << "\n";
  out << "operator.yaw_start = " << num(cfg.operator_profile.yaw.start) << "\n";
  out << "operator.yaw_stop = " << num(cfg.operator_profile.yaw.stop) << "\n";
  out << "operator.pitch_amplitude = "
      << num(cfg.operator_profile.pitch.amplitude) << "\n";
  out << "operator.pitch_period = " << num(cfg.operator_profile.pitch.period)
      << "\n";
  out << "operator.pitch_start = " << num(cfg.operator_profile.pitch.start)
      << "\n";
  out << "operator.pitch_stop = " << num(cfg.operator_profile.pitch.stop)
      << "\n";

  out << "wall.yaw_enabled = " << onoff(cfg.wall.yaw.enabled) << "\n";
  out << "wall.yaw_angle = " << num(cfg.wall.yaw.angle) << "\n";
  out << "wall.yaw_stiffness = " << num(cfg.wall.yaw.stiffness) << "\n";
  out << "wall.yaw_damping = " << num(cfg.wall.yaw.damping) << "\n";
  out << "wall.yaw_side = " << cfg.wall.yaw.side << "\n";
  out << "wall.pitch_enabled = " << onoff(cfg.wall.pitch.enabled) << "\n";
  out << "wall.pitch_angle = " << num(cfg.wall.pitch.angle) << "\n";
  out << "wall.pitch_stiffness = " << num(cfg.wall.pitch.stiffness) << "\n";
  out << "wall.pitch_damping = " << num(cfg.wall.pitch.damping) << "\n";
  out << "wall.pitch_side = " << cfg.wall.pitch.side << "\n";
  return out.str();
}

}  // namespace tbt
