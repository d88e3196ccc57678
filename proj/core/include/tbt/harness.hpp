#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "tbt/attacker.hpp"
#include "tbt/channel.hpp"
#include "tbt/controller.hpp"
#include "tbt/crypto.hpp"
#include "tbt/dynamics.hpp"

namespace tbt {

/// Scripted operator: per-axis sinusoid reference tracked by an impedance
/// (stiffness/damping) acting on the leader. Outside [start, stop) the
/// operator applies no torque.
struct AxisProfile {
  double amplitude = 0.0;  // rad
  double period = 8.0;     // s
  double start = 0.0;      // s
  double stop = 0.0;       // s
};

struct OperatorProfile {
  AxisProfile yaw{0.15, 16.0, 25.0, 55.0};
  AxisProfile pitch{0.09, 12.0, 0.0, 25.0};
  double stiffness = 5.0;   // N m / rad
  double damping = 0.2;     // N m s / rad
};

/// One-sided spring-damper wall per axis. `side` = +1 blocks increasing
/// angles (contact when theta > angle), -1 blocks decreasing ones.
struct AxisWall {
  bool enabled = false;
  double angle = 0.0;      // rad
  double stiffness = 100.0;
  double damping = 2.0;
  int side = 1;
};

struct WallModel {
  AxisWall yaw{false, -5.0 * 3.14159265358979323846 / 180.0, 100.0, 2.0, -1};
  AxisWall pitch{false, 3.0 * 3.14159265358979323846 / 180.0, 100.0, 2.0, +1};
};

struct TraceRow {
  double t = 0.0;
  // Local quantities, leader then follower: angles, estimated reaction
  // torques (wire sign convention), applied motor torques.
  double l_th1 = 0, l_th2 = 0, l_taue1 = 0, l_taue2 = 0, l_tau1 = 0, l_tau2 = 0;
  double f_th1 = 0, f_th2 = 0, f_taue1 = 0, f_taue2 = 0, f_tau1 = 0, f_tau2 = 0;
  // Wire payloads decoded before and after the proxy, per direction.
  std::array<double, 4> l2f_pre{}, l2f_post{}, f2l_pre{}, f2l_post{};
  int implausible = 0;  // implausible-decode flags raised this tick
};

struct TraceLog {
  std::vector<TraceRow> rows;
  double tick_period = 0.02;
  bool diverged = false;
};

enum class Transport { kLoopback, kUdp };

struct RunConfig {
  ScenarioName scenario = ScenarioName::kNormal;
  AttackMode mode = AttackMode::kCiphertext;
  Transport transport = Transport::kLoopback;
  std::uint64_t seed = 1;
  double duration = 60.0;      // s
  double tick_period = 0.02;   // s
  double dt_phys = 0.001;      // s, integrator substep
  double onset_time = 0.0;     // s, attack active for t >= onset_time

  ManipulatorParams params;
  ControllerGains gains;
  OperatorProfile operator_profile;
  WallModel wall;
  JointState leader_ic, follower_ic;

  unsigned gamma = 16;
  unsigned key_bits = 64;
  std::string key_file;  // optional; generated from seed when empty

  double observer_cutoff = 30.0;  // rad/s
  bool gravity_comp_leader = true;
  bool gravity_comp_follower = true;
  bool pitch_lock = false;
  double divergence_bound = 1e6;

  LatencyModel latency{0.010, 0.0, 0.0};

  // Overrides the scenario table when set (plaintext mode only for d != 0).
  std::optional<AttackScenario> custom_attack;

  // UDP demo mode endpoints (host:port).
  std::string leader_addr = "127.0.0.1:47001";
  std::string follower_addr = "127.0.0.1:47002";
  std::string proxy_leader_addr = "127.0.0.1:47003";
  std::string proxy_follower_addr = "127.0.0.1:47004";
};

struct RunResult {
  TraceLog log;
  std::vector<std::uint8_t> message_log;  // length-prefixed wire records
  std::uint64_t implausible_total = 0;
};

/// Closed-loop simulation of the two robots, the encrypted channel and the
/// in-path attacker, at 20 ms control ticks with RK4 substeps. Deterministic
/// per seed; divergence aborts with a partial, flagged log.
RunResult run_scenario(const RunConfig& cfg);

TorquePair operator_torque(double t, const OperatorProfile& profile,
                           const JointState& leader_state);
TorquePair wall_torque(const JointState& follower_state, const WallModel& wall);

struct VerifyReport {
  bool pass = false;
  bool leader_clause_pass = false;    // Definition clause 1
  bool follower_clause_pass = false;  // clause 2, identity-or-mirror
  bool follower_mirrored = false;     // which branch satisfied clause 2
  bool shape_mismatch = false;        // differing tick counts (e.g. divergence)
  double max_leader_diff = 0.0;
  double max_follower_diff = 0.0;
  std::size_t ticks_compared = 0;
  std::uint64_t attacked_implausible = 0;
  std::map<std::string, double> per_quantity;  // leader-perceived max diffs
};

/// Tick-by-tick comparison of every leader-perceived quantity between a
/// baseline and an attacked run, plus the follower-perspective check: the
/// follower-side trace must be indistinguishable from a legitimate run,
/// either the baseline itself or its exact yaw mirror.
VerifyReport verify_undetectable(const TraceLog& baseline,
                                 const TraceLog& attacked, double tol);

void export_csv(const TraceLog& log, const std::string& path);
TraceLog load_csv(const std::string& path);

/// Writes per-axis angle and reaction-torque SVG panels (leader vs follower).
void emit_plots(const TraceLog& log, const std::string& directory);

}  // namespace tbt
