#include "tbt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace tbt {

namespace {

double axis_reference(double t, const AxisProfile& axis) {
  if (t < axis.start || t >= axis.stop || axis.amplitude == 0.0) return 0.0;
  const double twopi = 2.0 * 3.14159265358979323846;
  return axis.amplitude * std::sin(twopi * (t - axis.start) / axis.period);
}

bool axis_active(double t, const AxisProfile& axis) {
  return t >= axis.start && t < axis.stop;
}

double one_sided_wall(double theta, double omega, const AxisWall& wall) {
  if (!wall.enabled) return 0.0;
  const double penetration = (theta - wall.angle) * wall.side;
  if (penetration <= 0.0) return 0.0;  // boundary itself is the open side
  double torque = wall.stiffness * (wall.angle - theta) - wall.damping * omega;
  // Repulsive only: the wall can push back, never pull in.
  if (wall.side > 0 && torque > 0.0) torque = 0.0;
  if (wall.side < 0 && torque < 0.0) torque = 0.0;
  return torque;
}

}  // namespace

TorquePair operator_torque(double t, const OperatorProfile& profile,
                           const JointState& leader_state) {
  double t_yaw = 0.0, t_pitch = 0.0;
  if (axis_active(t, profile.yaw)) {
    const double r = axis_reference(t, profile.yaw);
    t_yaw = profile.stiffness * (r - leader_state.theta1) -
            profile.damping * leader_state.omega1;
  }
  if (axis_active(t, profile.pitch)) {
    const double r = axis_reference(t, profile.pitch);
    t_pitch = profile.stiffness * (r - leader_state.theta2) -
              profile.damping * leader_state.omega2;
  }
  // Physical torques map into the dynamics slots: yaw enters with +, pitch
  // with -, so the pitch slot carries the negated physical torque.
  return {t_yaw, -t_pitch};
}

TorquePair wall_torque(const JointState& follower_state, const WallModel& wall) {
  const double t_yaw =
      one_sided_wall(follower_state.theta1, follower_state.omega1, wall.yaw);
  const double t_pitch =
      one_sided_wall(follower_state.theta2, follower_state.omega2, wall.pitch);
  return {t_yaw, -t_pitch};
}

namespace {

struct Node {
  JointState state;
  ObserverState obs;
  TorquePair cmd;
  SignalVector last_received;
  bool gravity_comp = true;
  Side side = Side::kLeader;
};

SignalVector local_signals(const Node& node) {
  return {node.state.theta1, node.state.theta2, node.obs.tau_e_hat1,
          node.obs.tau_e_hat2};
}

struct DecodedMessage {
  SignalVector sig;
  int implausible = 0;
};

class Codec {
 public:
  Codec(const KeyPair& keys, const EncodingParams& enc, AttackMode mode,
        std::uint64_t nonce_seed)
      : keys_(keys), enc_(enc), mode_(mode), nonce_rng_(nonce_seed) {}

  ChannelMessage make_message(const SignalVector& sig, Direction dir,
                              std::uint32_t seq, std::uint32_t tick) {
    ChannelMessage msg;
    msg.direction = dir;
    msg.seq = seq;
    msg.tick = tick;
    const auto slots = sig.slots();
    for (double v : slots) {
      const BigInt m = encode(v, enc_);
      if (mode_ == AttackMode::kPlaintext) {
        msg.payload.push_back(m);
      } else {
        const BigInt r = nonce_rng_.in_range(1, keys_.pk.q);
        const Ciphertext c = encrypt(m, keys_.pk, r);
        msg.payload.push_back(c.c1);
        msg.payload.push_back(c.c2);
      }
    }
    return msg;
  }

  DecodedMessage decode_message(const ChannelMessage& msg) const {
    DecodedMessage out;
    std::array<double, 4> v{};
    for (int i = 0; i < 4; ++i) {
      BigInt m;
      if (msg.payload.size() == 4) {
        m = msg.payload[i];
      } else {
        m = decrypt(Ciphertext{msg.payload[2 * i], msg.payload[2 * i + 1]},
                    keys_.sk, keys_.pk);
      }
      const Decoded d = decode(m, enc_);
      v[i] = d.value;
      if (d.implausible) ++out.implausible;
    }
    out.sig = SignalVector::from_slots(v);
    return out;
  }

 private:
  const KeyPair& keys_;
  EncodingParams enc_;
  AttackMode mode_;
  DetRng nonce_rng_;
};

KeyPair obtain_keys(const RunConfig& cfg) {
  if (!cfg.key_file.empty()) return load_key_file(cfg.key_file);
  return keygen(cfg.key_bits, cfg.seed);
}

AttackScenario obtain_scenario(const RunConfig& cfg) {
  if (cfg.custom_attack) return *cfg.custom_attack;
  return scenario_config(cfg.scenario, cfg.leader_ic.theta1,
                         cfg.follower_ic.theta1, cfg.mode);
}

RunResult run_loopback(const RunConfig& cfg) {
  const KeyPair keys = obtain_keys(cfg);
  const EncodingParams enc{cfg.gamma, keys.pk.p};
  const AttackScenario scenario = obtain_scenario(cfg);
  Codec codec(keys, enc, cfg.mode, cfg.seed ^ 0x6e6f6e6365ULL);

  Node leader, follower;
  leader.state = cfg.leader_ic;
  follower.state = cfg.follower_ic;
  leader.obs.cutoff = follower.obs.cutoff = cfg.observer_cutoff;
  leader.gravity_comp = cfg.gravity_comp_leader;
  follower.gravity_comp = cfg.gravity_comp_follower;
  leader.side = Side::kLeader;
  follower.side = Side::kFollower;

  LoopbackLink l2f(cfg.latency, cfg.tick_period, cfg.seed ^ 0x12f);
  LoopbackLink f2l(cfg.latency, cfg.tick_period, cfg.seed ^ 0xf21);

  RunResult result;
  result.log.tick_period = cfg.tick_period;

  // Synchronize the loop before t=0: both sides exchange their initial
  // signals through the (possibly already active) attacked channel.
  {
    const bool active = cfg.onset_time <= 0.0;
    const ChannelMessage init_l2f =
        codec.make_message(local_signals(leader), Direction::kL2F, 0, 0);
    const ChannelMessage init_f2l =
        codec.make_message(local_signals(follower), Direction::kF2L, 0, 0);
    follower.last_received =
        codec.decode_message(proxy_forward(init_l2f, scenario, enc, active)).sig;
    leader.last_received =
        codec.decode_message(proxy_forward(init_f2l, scenario, enc, active)).sig;
  }

  const auto n_ticks =
      static_cast<std::uint32_t>(std::llround(cfg.duration / cfg.tick_period));
  const int n_sub = std::max(1, static_cast<int>(std::llround(
                                    cfg.tick_period / cfg.dt_phys)));
  const double dt = cfg.tick_period / n_sub;

  for (std::uint32_t k = 0; k < n_ticks; ++k) {
    const double t = k * cfg.tick_period;
    const bool active = t >= cfg.onset_time - 1e-12;
    TraceRow row;
    row.t = t;

    try {
      const SignalVector l_sig = local_signals(leader);
      const SignalVector f_sig = local_signals(follower);

      ChannelMessage msg_l2f = codec.make_message(l_sig, Direction::kL2F, k + 1, k);
      ChannelMessage msg_f2l = codec.make_message(f_sig, Direction::kF2L, k + 1, k);
      row.l2f_pre = codec.decode_message(msg_l2f).sig.slots();
      row.f2l_pre = codec.decode_message(msg_f2l).sig.slots();
      append_record(result.message_log, serialize(msg_l2f));
      append_record(result.message_log, serialize(msg_f2l));

      const ChannelMessage atk_l2f = proxy_forward(msg_l2f, scenario, enc, active);
      const ChannelMessage atk_f2l = proxy_forward(msg_f2l, scenario, enc, active);
      const DecodedMessage post_l2f = codec.decode_message(atk_l2f);
      const DecodedMessage post_f2l = codec.decode_message(atk_f2l);
      row.l2f_post = post_l2f.sig.slots();
      row.f2l_post = post_f2l.sig.slots();
      row.implausible = post_l2f.implausible + post_f2l.implausible;
      result.implausible_total += row.implausible;
      append_record(result.message_log, serialize(atk_l2f));
      append_record(result.message_log, serialize(atk_f2l));

      l2f.send(atk_l2f, k);
      f2l.send(atk_f2l, k);
      if (const auto delivered = l2f.poll(k))
        follower.last_received = codec.decode_message(*delivered).sig;
      if (const auto delivered = f2l.poll(k))
        leader.last_received = codec.decode_message(*delivered).sig;

      leader.cmd = four_channel_command(l_sig, leader.state.omega1,
                                        leader.state.omega2, leader.last_received,
                                        cfg.gains, cfg.params,
                                        leader.gravity_comp, leader.side);
      follower.cmd = four_channel_command(
          f_sig, follower.state.omega1, follower.state.omega2,
          follower.last_received, cfg.gains, cfg.params, follower.gravity_comp,
          follower.side);
      if (cfg.pitch_lock) {
        leader.cmd.tau2 = 0.0;
        follower.cmd.tau2 = 0.0;
      }

      row.l_th1 = leader.state.theta1;
      row.l_th2 = leader.state.theta2;
      row.l_taue1 = leader.obs.tau_e_hat1;
      row.l_taue2 = leader.obs.tau_e_hat2;
      row.l_tau1 = leader.cmd.tau1;
      row.l_tau2 = leader.cmd.tau2;
      row.f_th1 = follower.state.theta1;
      row.f_th2 = follower.state.theta2;
      row.f_taue1 = follower.obs.tau_e_hat1;
      row.f_taue2 = follower.obs.tau_e_hat2;
      row.f_tau1 = follower.cmd.tau1;
      row.f_tau2 = follower.cmd.tau2;
      result.log.rows.push_back(row);

      for (int j = 0; j < n_sub; ++j) {
        const double t_sub = t + j * dt;
        const TorquePair ext_l =
            operator_torque(t_sub, cfg.operator_profile, leader.state);
        const TorquePair ext_f = wall_torque(follower.state, cfg.wall);
        leader.obs = estimate_reaction_torque(leader.state, leader.cmd,
                                              cfg.params, leader.obs, dt);
        follower.obs = estimate_reaction_torque(follower.state, follower.cmd,
                                                cfg.params, follower.obs, dt);
        leader.state = step_rk4(leader.state, leader.cmd, ext_l, cfg.params, dt,
                                cfg.divergence_bound);
        follower.state = step_rk4(follower.state, follower.cmd, ext_f,
                                  cfg.params, dt, cfg.divergence_bound);
        if (cfg.pitch_lock) {
          leader.state.theta2 = cfg.leader_ic.theta2;
          leader.state.omega2 = 0.0;
          follower.state.theta2 = cfg.follower_ic.theta2;
          follower.state.omega2 = 0.0;
        }
      }
    } catch (const DivergenceError&) {
      result.log.diverged = true;
      break;
    } catch (const EncodeOverflow&) {
      result.log.diverged = true;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// UDP demo mode: leader node, follower node and proxy as concurrent tasks
// over real datagram sockets. Not used for verification.

struct UdpHalfLog {
  std::vector<TraceRow> rows;  // only this node's fields populated
};

void udp_proxy_task(const RunConfig& cfg, const AttackScenario& scenario,
                    const EncodingParams& enc, std::atomic<bool>& done) {
  UdpEndpoint from_leader(cfg.proxy_leader_addr, cfg.leader_addr);
  UdpEndpoint from_follower(cfg.proxy_follower_addr, cfg.follower_addr);
  while (!done.load()) {
    bool idle = true;
    if (const auto bytes = from_leader.try_receive()) {
      idle = false;
      try {
        const ChannelMessage msg = deserialize(*bytes);
        from_follower.send(serialize(proxy_forward(msg, scenario, enc, true)));
      } catch (const WireError&) {
      }
    }
    if (const auto bytes = from_follower.try_receive()) {
      idle = false;
      try {
        const ChannelMessage msg = deserialize(*bytes);
        from_leader.send(serialize(proxy_forward(msg, scenario, enc, true)));
      } catch (const WireError&) {
      }
    }
    if (idle) std::this_thread::sleep_for(std::chrono::microseconds(200));
  }
}

void udp_node_task(const RunConfig& cfg, const KeyPair& keys,
                   const EncodingParams& enc, Side side, UdpHalfLog& half,
                   std::atomic<bool>& done) {
  const bool is_leader = side == Side::kLeader;
  UdpEndpoint endpoint(is_leader ? cfg.leader_addr : cfg.follower_addr,
                       is_leader ? cfg.proxy_leader_addr
                                 : cfg.proxy_follower_addr);
  Codec codec(keys, enc, cfg.mode,
              cfg.seed ^ (is_leader ? 0x6e1ULL : 0x6e2ULL));

  Node node;
  node.state = is_leader ? cfg.leader_ic : cfg.follower_ic;
  node.obs.cutoff = cfg.observer_cutoff;
  node.gravity_comp =
      is_leader ? cfg.gravity_comp_leader : cfg.gravity_comp_follower;
  node.side = side;
  node.last_received = local_signals(node);  // hold own state until first rx

  const auto n_ticks =
      static_cast<std::uint32_t>(std::llround(cfg.duration / cfg.tick_period));
  const int n_sub = std::max(1, static_cast<int>(std::llround(
                                    cfg.tick_period / cfg.dt_phys)));
  const double dt = cfg.tick_period / n_sub;
  std::int64_t last_seq = -1;

  const auto start = std::chrono::steady_clock::now();
  for (std::uint32_t k = 0; k < n_ticks && !done.load(); ++k) {
    std::this_thread::sleep_until(
        start + std::chrono::duration<double>(k * cfg.tick_period));
    const double t = k * cfg.tick_period;
    TraceRow row;
    row.t = t;

    const SignalVector sig = local_signals(node);
    const ChannelMessage msg =
        codec.make_message(sig, is_leader ? Direction::kL2F : Direction::kF2L,
                           k + 1, k);
    try {
      endpoint.send(serialize(msg));
    } catch (const std::exception&) {
    }

    while (const auto bytes = endpoint.try_receive()) {
      try {
        const ChannelMessage rx = deserialize(*bytes);
        if (static_cast<std::int64_t>(rx.seq) <= last_seq) continue;
        last_seq = rx.seq;
        const DecodedMessage decoded = codec.decode_message(rx);
        node.last_received = decoded.sig;
        row.implausible += decoded.implausible;
        auto& post = is_leader ? row.f2l_post : row.l2f_post;
        post = decoded.sig.slots();
      } catch (const WireError&) {
      }
    }

    node.cmd = four_channel_command(sig, node.state.omega1, node.state.omega2,
                                    node.last_received, cfg.gains, cfg.params,
                                    node.gravity_comp, node.side);
    if (cfg.pitch_lock) node.cmd.tau2 = 0.0;

    auto& th1 = is_leader ? row.l_th1 : row.f_th1;
    auto& th2 = is_leader ? row.l_th2 : row.f_th2;
    auto& te1 = is_leader ? row.l_taue1 : row.f_taue1;
    auto& te2 = is_leader ? row.l_taue2 : row.f_taue2;
    auto& tq1 = is_leader ? row.l_tau1 : row.f_tau1;
    auto& tq2 = is_leader ? row.l_tau2 : row.f_tau2;
    th1 = node.state.theta1;
    th2 = node.state.theta2;
    te1 = node.obs.tau_e_hat1;
    te2 = node.obs.tau_e_hat2;
    tq1 = node.cmd.tau1;
    tq2 = node.cmd.tau2;
    auto& pre = is_leader ? row.l2f_pre : row.f2l_pre;
    pre = codec.decode_message(msg).sig.slots();
    half.rows.push_back(row);

    try {
      for (int j = 0; j < n_sub; ++j) {
        const double t_sub = t + j * dt;
        const TorquePair ext =
            is_leader ? operator_torque(t_sub, cfg.operator_profile, node.state)
                      : wall_torque(node.state, cfg.wall);
        node.obs =
            estimate_reaction_torque(node.state, node.cmd, cfg.params, node.obs, dt);
        node.state = step_rk4(node.state, node.cmd, ext, cfg.params, dt,
                              cfg.divergence_bound);
        if (cfg.pitch_lock) {
          node.state.theta2 =
              is_leader ? cfg.leader_ic.theta2 : cfg.follower_ic.theta2;
          node.state.omega2 = 0.0;
        }
      }
    } catch (const DivergenceError&) {
      done.store(true);
      break;
    }
  }
}

RunResult run_udp(const RunConfig& cfg) {
  const KeyPair keys = obtain_keys(cfg);
  const EncodingParams enc{cfg.gamma, keys.pk.p};
  const AttackScenario scenario = obtain_scenario(cfg);

  UdpHalfLog leader_half, follower_half;
  std::atomic<bool> done{false};

  std::thread proxy(
      [&] { udp_proxy_task(cfg, scenario, enc, done); });
  std::thread leader([&] {
    udp_node_task(cfg, keys, enc, Side::kLeader, leader_half, done);
  });
  std::thread follower([&] {
    udp_node_task(cfg, keys, enc, Side::kFollower, follower_half, done);
  });
  leader.join();
  follower.join();
  done.store(true);
  proxy.join();

  RunResult result;
  result.log.tick_period = cfg.tick_period;
  const std::size_t n = std::min(leader_half.rows.size(), follower_half.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    TraceRow row = leader_half.rows[i];
    const TraceRow& f = follower_half.rows[i];
    row.f_th1 = f.f_th1;
    row.f_th2 = f.f_th2;
    row.f_taue1 = f.f_taue1;
    row.f_taue2 = f.f_taue2;
    row.f_tau1 = f.f_tau1;
    row.f_tau2 = f.f_tau2;
    row.f2l_pre = f.f2l_pre;
    row.l2f_post = f.l2f_post;
    row.implausible += f.implausible;
    result.implausible_total += row.implausible;
    result.log.rows.push_back(row);
  }
  return result;
}

}  // namespace

RunResult run_scenario(const RunConfig& cfg) {
  if (cfg.duration <= 0.0) throw std::invalid_argument("duration must be > 0");
  if (cfg.transport == Transport::kLoopback) return run_loopback(cfg);
  return run_udp(cfg);
}

// ---------------------------------------------------------------------------
// Verification

namespace {

struct Column {
  const char* name;
  double (*get)(const TraceRow&);
  bool yaw_channel;  // transforms under the yaw mirror
};

const Column kLeaderColumns[] = {
    {"l_th1", [](const TraceRow& r) { return r.l_th1; }, true},
    {"l_th2", [](const TraceRow& r) { return r.l_th2; }, false},
    {"l_taue1", [](const TraceRow& r) { return r.l_taue1; }, true},
    {"l_taue2", [](const TraceRow& r) { return r.l_taue2; }, false},
    {"l_tau1", [](const TraceRow& r) { return r.l_tau1; }, true},
    {"l_tau2", [](const TraceRow& r) { return r.l_tau2; }, false},
    {"f2l_post0", [](const TraceRow& r) { return r.f2l_post[0]; }, true},
    {"f2l_post1", [](const TraceRow& r) { return r.f2l_post[1]; }, false},
    {"f2l_post2", [](const TraceRow& r) { return r.f2l_post[2]; }, true},
    {"f2l_post3", [](const TraceRow& r) { return r.f2l_post[3]; }, false},
};

const Column kFollowerColumns[] = {
    {"f_th1", [](const TraceRow& r) { return r.f_th1; }, true},
    {"f_th2", [](const TraceRow& r) { return r.f_th2; }, false},
    {"f_taue1", [](const TraceRow& r) { return r.f_taue1; }, true},
    {"f_taue2", [](const TraceRow& r) { return r.f_taue2; }, false},
    {"f_tau1", [](const TraceRow& r) { return r.f_tau1; }, true},
    {"f_tau2", [](const TraceRow& r) { return r.f_tau2; }, false},
    {"l2f_post0", [](const TraceRow& r) { return r.l2f_post[0]; }, true},
    {"l2f_post1", [](const TraceRow& r) { return r.l2f_post[1]; }, false},
    {"l2f_post2", [](const TraceRow& r) { return r.l2f_post[2]; }, true},
    {"l2f_post3", [](const TraceRow& r) { return r.l2f_post[3]; }, false},
};

double max_column_diff(const TraceLog& a, const TraceLog& b, const Column& col,
                       std::size_t n, bool mirrored) {
  double worst = 0.0;
  // A mirrored yaw channel satisfies attacked = c - baseline with the
  // constant fixed by the first tick (c = 0 for zero initial conditions).
  const double center =
      mirrored && col.yaw_channel && n > 0
          ? col.get(a.rows[0]) + col.get(b.rows[0])
          : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double base = col.get(a.rows[i]);
    const double att = col.get(b.rows[i]);
    const double expected = mirrored && col.yaw_channel ? center - base : base;
    worst = std::max(worst, std::fabs(att - expected));
  }
  return worst;
}

}  // namespace

VerifyReport verify_undetectable(const TraceLog& baseline,
                                 const TraceLog& attacked, double tol) {
  if (std::fabs(baseline.tick_period - attacked.tick_period) > 1e-12)
    throw std::invalid_argument("log shape mismatch: tick periods differ");
  if (baseline.rows.empty() || attacked.rows.empty())
    throw std::invalid_argument("log shape mismatch: empty trace");

  VerifyReport report;
  report.ticks_compared = std::min(baseline.rows.size(), attacked.rows.size());
  report.shape_mismatch = baseline.rows.size() != attacked.rows.size();
  const std::size_t n = report.ticks_compared;

  report.leader_clause_pass = true;
  for (const Column& col : kLeaderColumns) {
    const double d = max_column_diff(baseline, attacked, col, n, false);
    report.per_quantity[col.name] = d;
    report.max_leader_diff = std::max(report.max_leader_diff, d);
    if (d >= tol) report.leader_clause_pass = false;
  }

  double identity_worst = 0.0, mirror_worst = 0.0;
  for (const Column& col : kFollowerColumns) {
    identity_worst = std::max(identity_worst,
                              max_column_diff(baseline, attacked, col, n, false));
    mirror_worst = std::max(mirror_worst,
                            max_column_diff(baseline, attacked, col, n, true));
  }
  if (identity_worst < tol) {
    report.follower_clause_pass = true;
    report.max_follower_diff = identity_worst;
  } else if (mirror_worst < tol) {
    report.follower_clause_pass = true;
    report.follower_mirrored = true;
    report.max_follower_diff = mirror_worst;
  } else {
    report.max_follower_diff = std::min(identity_worst, mirror_worst);
  }

  for (const TraceRow& row : attacked.rows)
    report.attacked_implausible += row.implausible;

  report.pass = report.leader_clause_pass && report.follower_clause_pass &&
                !report.shape_mismatch && !attacked.diverged;
  return report;
}

// ---------------------------------------------------------------------------
// CSV and plots

namespace {

const char* kCsvHeader =
    "t,l_th1,l_th2,l_taue1,l_taue2,l_tau1,l_tau2,"
    "f_th1,f_th2,f_taue1,f_taue2,f_tau1,f_tau2,"
    "l2f_pre0,l2f_pre1,l2f_pre2,l2f_pre3,"
    "l2f_post0,l2f_post1,l2f_post2,l2f_post3,"
    "f2l_pre0,f2l_pre1,f2l_pre2,f2l_pre3,"
    "f2l_post0,f2l_post1,f2l_post2,f2l_post3,implausible";

void row_values(const TraceRow& r, std::vector<double>& out) {
  out = {r.t,      r.l_th1,   r.l_th2,   r.l_taue1, r.l_taue2, r.l_tau1,
         r.l_tau2, r.f_th1,   r.f_th2,   r.f_taue1, r.f_taue2, r.f_tau1,
         r.f_tau2};
  for (const auto& a : {r.l2f_pre, r.l2f_post, r.f2l_pre, r.f2l_post})
    out.insert(out.end(), a.begin(), a.end());
}

}  // namespace

void export_csv(const TraceLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", log.tick_period);
  out << "# tick_period=" << buf << "\n";
  if (log.diverged) out << "# diverged\n";
  out << kCsvHeader << "\n";
  std::vector<double> values;
  for (const TraceRow& r : log.rows) {
    row_values(r, values);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
      if (i) out << ',';
      out << buf;
    }
    out << ',' << r.implausible << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TraceLog load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  TraceLog log;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# tick_period=", 0) == 0)
        log.tick_period = std::stod(line.substr(14));
      else if (line == "# diverged")
        log.diverged = true;
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader)
        throw std::runtime_error("unexpected CSV header in " + path);
      header_seen = true;
      continue;
    }
    std::vector<double> v;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) v.push_back(std::stod(field));
    if (v.size() != 30)
      throw std::runtime_error("bad CSV row width in " + path);
    TraceRow r;
    std::size_t i = 0;
    r.t = v[i++];
    r.l_th1 = v[i++]; r.l_th2 = v[i++]; r.l_taue1 = v[i++]; r.l_taue2 = v[i++];
    r.l_tau1 = v[i++]; r.l_tau2 = v[i++];
    r.f_th1 = v[i++]; r.f_th2 = v[i++]; r.f_taue1 = v[i++]; r.f_taue2 = v[i++];
    r.f_tau1 = v[i++]; r.f_tau2 = v[i++];
    for (auto* a : {&r.l2f_pre, &r.l2f_post, &r.f2l_pre, &r.f2l_post})
      for (int j = 0; j < 4; ++j) (*a)[j] = v[i++];
    r.implausible = static_cast<int>(v[i++]);
    log.rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("missing CSV header in " + path);
  return log;
}

namespace {

void write_svg_panel(const std::string& path, const std::string& title,
                     const TraceLog& log, double (*leader)(const TraceRow&),
                     double (*follower)(const TraceRow&)) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const int width = 760, height = 380, margin = 50;

  double lo = 0.0, hi = 0.0;
  for (const TraceRow& r : log.rows) {
    lo = std::min({lo, leader(r), follower(r)});
    hi = std::max({hi, leader(r), follower(r)});
  }
  if (hi - lo < 1e-9) hi = lo + 1e-9;
  const double t_max = log.rows.empty() ? 1.0 : log.rows.back().t;

  const auto x_of = [&](double t) {
    return margin + (width - 2 * margin) * (t_max > 0 ? t / t_max : 0.0);
  };
  const auto y_of = [&](double v) {
    return height - margin - (height - 2 * margin) * (v - lo) / (hi - lo);
  };
  const auto polyline = [&](double (*get)(const TraceRow&),
                            const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1\" points=\"";
    for (const TraceRow& r : log.rows)
      out << x_of(r.t) << ',' << y_of(get(r)) << ' ';
    out << "\"/>\n";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">"
      << title << "</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  polyline(leader, "#1f77b4");
  polyline(follower, "#d62728");
  out << "<text x=\"" << width - margin << "\" y=\"" << margin
      << "\" text-anchor=\"end\" fill=\"#1f77b4\">leader</text>\n";
  out << "<text x=\"" << width - margin << "\" y=\"" << margin + 18
      << "\" text-anchor=\"end\" fill=\"#d62728\">follower</text>\n";
  out << "</svg>\n";
}

}  // namespace

void emit_plots(const TraceLog& log, const std::string& directory) {
  write_svg_panel(directory + "/yaw_angle.svg", "Yaw angle [rad]", log,
                  [](const TraceRow& r) { return r.l_th1; },
                  [](const TraceRow& r) { return r.f_th1; });
  write_svg_panel(directory + "/yaw_reaction.svg",
                  "Estimated yaw reaction torque [Nm]", log,
                  [](const TraceRow& r) { return r.l_taue1; },
                  [](const TraceRow& r) { return r.f_taue1; });
  write_svg_panel(directory + "/pitch_angle.svg", "Pitch angle [rad]", log,
                  [](const TraceRow& r) { return r.l_th2; },
                  [](const TraceRow& r) { return r.f_th2; });
  write_svg_panel(directory + "/pitch_reaction.svg",
                  "Estimated pitch reaction torque [Nm]", log,
                  [](const TraceRow& r) { return r.l_taue2; },
                  [](const TraceRow& r) { return r.f_taue2; });
}

}  // namespace tbt
