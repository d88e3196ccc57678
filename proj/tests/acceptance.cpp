// Acceptance suite: one criterion per invocation (1-8, or "all"), printing a
// single PASS/FAIL line per criterion. Exit 0 iff everything selected passed.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "tbt/attackability.hpp"
#include "tbt/attacker.hpp"
#include "tbt/channel.hpp"
#include "tbt/config.hpp"
#include "tbt/crypto.hpp"
#include "tbt/harness.hpp"

using namespace tbt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Crypto correctness: roundtrip, homomorphism, malleability, toy oracle.

Outcome criterion1() {
  KeyPair toy;
  toy.pk.p = 23;
  toy.pk.q = 11;
  toy.pk.gen = 2;
  toy.sk.s = 3;
  toy.pk.h = 8;
  const Ciphertext c = encrypt(4, toy.pk, 5);
  if (c.c1 != 9 || c.c2 != 18) return {false, "toy encryption mismatch"};
  if (decrypt(c, toy.sk, toy.pk) != 4) return {false, "toy decryption mismatch"};
  if (decrypt(malleate(c, 22, toy.pk.p), toy.sk, toy.pk) != 19)
    return {false, "toy negation malleation mismatch"};
  const Ciphertext doubled = malleate(c, 2, toy.pk.p);
  if (doubled.c2 != 13 || decrypt(doubled, toy.sk, toy.pk) != 8)
    return {false, "toy doubling malleation mismatch"};

  const KeyPair k = keygen(64, 20240901);
  DetRng rng(31337);
  for (int i = 0; i < 1000; ++i) {
    const BigInt m1 = rng.in_range(1, k.pk.p);
    const BigInt m2 = rng.in_range(1, k.pk.p);
    const Ciphertext a = encrypt(m1, k.pk, rng.in_range(1, k.pk.q));
    const Ciphertext b = encrypt(m2, k.pk, rng.in_range(1, k.pk.q));
    if (decrypt(a, k.sk, k.pk) != m1)
      return {false, "roundtrip failed at trial " + std::to_string(i)};
    if (decrypt(hom_mul(a, b, k.pk), k.sk, k.pk) != m1 * m2 % k.pk.p)
      return {false, "homomorphism failed at trial " + std::to_string(i)};
    const BigInt kk = rng.in_range(1, k.pk.p);
    if (decrypt(malleate(a, kk, k.pk.p), k.sk, k.pk) != kk * m1 % k.pk.p)
      return {false, "malleability law failed at trial " + std::to_string(i)};
  }
  return {true, "1000 random trials + toy-field oracle, all exact"};
}

// ---------------------------------------------------------------------------
// 2. Automorphism scan: yaw mirror always, pitch mirror only under gravity
//    compensation, scaling never.

Outcome criterion2() {
  ManipulatorParams params;
  const auto raw = enumerate_sign_candidates(params, false, 1000, 1e-9, 20240901);
  for (const auto& [cand, report] : raw) {
    const bool expect = cand.phi_x_diag[1] > 0.0;  // pitch mirror broken
    if (report.pass != expect) {
      std::ostringstream os;
      os << "diag(" << cand.phi_x_diag[0] << "," << cand.phi_x_diag[1]
         << ") without compensation: expected " << (expect ? "pass" : "reject");
      return {false, os.str()};
    }
  }
  for (const auto& [cand, report] :
       enumerate_sign_candidates(params, true, 1000, 1e-9, 20240901)) {
    if (!report.pass) {
      std::ostringstream os;
      os << "diag(" << cand.phi_x_diag[0] << "," << cand.phi_x_diag[1]
         << ") with compensation: expected pass, residual "
         << report.max_residual;
      return {false, os.str()};
    }
  }
  CandidateTransform doubling;
  doubling.phi_x_diag = Eigen::Vector2d(2.0, 2.0);
  doubling.phi_u_diag = Eigen::Vector2d(2.0, 2.0);
  if (check_automorphism(doubling, params, false, 1000, 1e-9, 20240901).pass)
    return {false, "diag(2,2) accepted without compensation"};
  if (check_automorphism(doubling, params, true, 1000, 1e-9, 20240901).pass)
    return {false, "diag(2,2) accepted with compensation"};
  return {true,
          "identity+yaw mirror pass raw, pitch mirror needs gravity "
          "compensation, scaling rejected; 1000 samples at 1e-9"};
}

// ---------------------------------------------------------------------------
// 3. Perfect undetectability of the reflection scenario, both modes.

Outcome criterion3() {
  for (AttackMode mode : {AttackMode::kPlaintext, AttackMode::kCiphertext}) {
    const char* tag = mode == AttackMode::kPlaintext ? "plaintext" : "ciphertext";
    RunConfig cfg;
    cfg.mode = mode;
    const TraceLog baseline = run_scenario(cfg).log;
    cfg.scenario = ScenarioName::kReflection;
    const TraceLog attacked = run_scenario(cfg).log;
    if (baseline.rows.size() != 3000 || attacked.rows.size() != 3000)
      return {false, std::string(tag) + ": expected 3000 ticks"};

    const VerifyReport report = verify_undetectable(baseline, attacked, 1e-9);
    if (!report.pass || !report.follower_mirrored) {
      std::ostringstream os;
      os << tag << ": verify failed, leader " << report.max_leader_diff
         << ", follower " << report.max_follower_diff;
      return {false, os.str()};
    }
    for (std::size_t i = 0; i < 3000; ++i) {
      if (std::fabs(attacked.rows[i].f_th1 + baseline.rows[i].f_th1) >= 1e-9)
        return {false, std::string(tag) + ": follower yaw not negated at tick " +
                           std::to_string(i)};
    }
  }
  return {true,
          "60 s / 3000 ticks: leader view identical and follower yaw exactly "
          "mirrored (max diff 0) in both modes"};
}

// ---------------------------------------------------------------------------
// 4. Negative controls: broken variants must be detected.

RunConfig yaw_active_config() {
  RunConfig cfg;
  cfg.duration = 20.0;
  cfg.operator_profile.yaw.start = 0.0;  // excite yaw from t = 0
  return cfg;
}

Outcome criterion4() {
  const RunConfig base_cfg = yaw_active_config();
  const TraceLog baseline = run_scenario(base_cfg).log;

  {  // (a) one-sided reflection: only the leader->follower direction attacked
    RunConfig cfg = base_cfg;
    AttackScenario one_sided =
        scenario_config(ScenarioName::kReflection, 0.0, 0.0, cfg.mode);
    one_sided.leader_dir = scenario_config(ScenarioName::kNormal).leader_dir;
    cfg.custom_attack = one_sided;
    const TraceLog attacked = run_scenario(cfg).log;
    if (verify_undetectable(baseline, attacked, 1e-9).pass)
      return {false, "(a) one-sided reflection went undetected"};
  }
  {  // (b) onset delayed by 1 s
    RunConfig cfg = base_cfg;
    cfg.scenario = ScenarioName::kReflection;
    cfg.onset_time = 1.0;
    const TraceLog attacked = run_scenario(cfg).log;
    if (verify_undetectable(baseline, attacked, 1e-9).pass)
      return {false, "(b) delayed onset went undetected"};
  }
  {  // (c) nonzero yaw initial conditions without the d correction
    RunConfig ic_cfg = yaw_active_config();
    ic_cfg.mode = AttackMode::kPlaintext;
    ic_cfg.leader_ic.theta1 = 0.1;
    ic_cfg.follower_ic.theta1 = 0.1;
    const TraceLog ic_baseline = run_scenario(ic_cfg).log;
    RunConfig cfg = ic_cfg;
    cfg.custom_attack =
        scenario_config(ScenarioName::kReflection, 0.0, 0.0, cfg.mode);
    const TraceLog attacked = run_scenario(cfg).log;
    if (verify_undetectable(ic_baseline, attacked, 1e-9).pass)
      return {false, "(c) reflection with d=0 went undetected"};
  }
  std::uint64_t implausible = 0;
  {  // (d) scaling in ciphertext mode
    RunConfig cfg = base_cfg;
    cfg.scenario = ScenarioName::kScaling;
    const RunResult res = run_scenario(cfg);
    implausible = res.implausible_total;
    const VerifyReport report = verify_undetectable(baseline, res.log, 1e-9);
    if (report.pass) return {false, "(d) scaling went undetected"};
    if (implausible < 1)
      return {false, "(d) scaling raised no implausible-decode flag"};
  }
  return {true, "all four broken variants detected; scaling raised " +
                    std::to_string(implausible) + " implausible flags"};
}

// ---------------------------------------------------------------------------
// 5. Offset vectors for nonzero initial conditions (plaintext, fine grid).

Outcome criterion5() {
  RunConfig cfg;
  cfg.mode = AttackMode::kPlaintext;
  cfg.gamma = 40;  // reflection center 0.1 is off the coarse default grid
  cfg.leader_ic.theta1 = 0.1;
  cfg.follower_ic.theta1 = 0.1;
  const TraceLog baseline = run_scenario(cfg).log;

  RunConfig with_d = cfg;
  with_d.scenario = ScenarioName::kReflection;
  const TraceLog attacked = run_scenario(with_d).log;
  const VerifyReport good = verify_undetectable(baseline, attacked, 1e-9);
  if (!good.pass) {
    std::ostringstream os;
    os << "d = 2*theta1(0) detected: leader " << good.max_leader_diff
       << ", follower " << good.max_follower_diff;
    return {false, os.str()};
  }

  RunConfig without_d = cfg;
  without_d.custom_attack =
      scenario_config(ScenarioName::kReflection, 0.0, 0.0, cfg.mode);
  const TraceLog bare = run_scenario(without_d).log;
  if (verify_undetectable(baseline, bare, 1e-9).pass)
    return {false, "same attack with d = 0 went undetected"};

  std::ostringstream os;
  os << "theta1(0)=0.1 both sides: with d PASS (leader diff "
     << good.max_leader_diff << "), without d FAIL";
  return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 6. Collision reproduction: plateau at the wall, amplified leader force.

Outcome criterion6() {
  RunConfig free_cfg;
  const TraceLog free_log = run_scenario(free_cfg).log;

  RunConfig wall_cfg;
  wall_cfg.wall.yaw.enabled = true;
  wall_cfg.wall.pitch.enabled = true;
  const TraceLog wall_log = run_scenario(wall_cfg).log;
  if (wall_log.diverged) return {false, "wall run diverged"};

  const double half_deg = 0.5 * 3.14159265358979323846 / 180.0;
  struct Axis {
    const char* name;
    double wall_angle;
    int side;
    std::function<double(const TraceRow&)> angle;
    std::function<double(const TraceRow&)> force;
  };
  const Axis axes[] = {
      {"yaw", wall_cfg.wall.yaw.angle, wall_cfg.wall.yaw.side,
       [](const TraceRow& r) { return r.f_th1; },
       [](const TraceRow& r) { return r.l_taue1; }},
      {"pitch", wall_cfg.wall.pitch.angle, wall_cfg.wall.pitch.side,
       [](const TraceRow& r) { return r.f_th2; },
       [](const TraceRow& r) { return r.l_taue2; }},
  };

  std::ostringstream os;
  for (const Axis& axis : axes) {
    int contact_ticks = 0;
    double max_penetration = 0.0;
    double wall_force = 0.0;
    for (const TraceRow& r : wall_log.rows) {
      const double pen = (axis.angle(r) - axis.wall_angle) * axis.side;
      if (pen > 0.0) {
        ++contact_ticks;
        max_penetration = std::max(max_penetration, pen);
      }
      wall_force = std::max(wall_force, std::fabs(axis.force(r)));
    }
    double free_force = 0.0;
    for (const TraceRow& r : free_log.rows)
      free_force = std::max(free_force, std::fabs(axis.force(r)));

    if (contact_ticks < 50)
      return {false, std::string(axis.name) + ": wall never engaged"};
    if (max_penetration >= half_deg) {
      std::ostringstream bad;
      bad << axis.name << ": penetration "
          << max_penetration * 180.0 / 3.14159265358979323846
          << " deg exceeds 0.5 deg";
      return {false, bad.str()};
    }
    if (wall_force < 2.0 * free_force) {
      std::ostringstream bad;
      bad << axis.name << ": contact force " << wall_force
          << " below 2x free-motion max " << free_force;
      return {false, bad.str()};
    }
    os << axis.name << " pen "
       << max_penetration * 180.0 / 3.14159265358979323846 << " deg, force x"
       << wall_force / free_force << "; ";
  }
  return {true, os.str() + "plateau and >=2x force reproduced"};
}

// ---------------------------------------------------------------------------
// 7. Mode equivalence of the attacked wire values, tick by tick.

Outcome criterion7() {
  RunConfig cfg;
  cfg.scenario = ScenarioName::kReflection;
  cfg.mode = AttackMode::kCiphertext;
  const TraceLog cipher = run_scenario(cfg).log;
  cfg.mode = AttackMode::kPlaintext;
  const TraceLog plain = run_scenario(cfg).log;
  if (cipher.rows.size() != plain.rows.size())
    return {false, "mode runs have different lengths"};

  std::size_t equal = 0;
  for (std::size_t i = 0; i < cipher.rows.size(); ++i) {
    bool same = true;
    for (int s = 0; s < 4; ++s) {
      if (cipher.rows[i].l2f_post[s] != plain.rows[i].l2f_post[s]) same = false;
      if (cipher.rows[i].f2l_post[s] != plain.rows[i].f2l_post[s]) same = false;
    }
    if (same) ++equal;
  }
  const double frac = double(equal) / double(cipher.rows.size());
  std::ostringstream os;
  os << equal << "/" << cipher.rows.size() << " ticks bit-equal";
  if (frac < 0.999) return {false, os.str()};
  if (equal != cipher.rows.size())
    os << " (remainder would need parity-event logs; expected none)";
  return {true, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Determinism and wire robustness.

Outcome criterion8() {
  RunConfig cfg;
  cfg.duration = 10.0;
  const RunResult a = run_scenario(cfg);
  const RunResult b = run_scenario(cfg);
  if (a.message_log != b.message_log)
    return {false, "message logs differ between identical runs"};

  const auto csv_string = [](const TraceLog& log) {
    const std::string path = "acceptance_tmp.csv";
    export_csv(log, path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::filesystem::remove(path);
    return ss.str();
  };
  if (csv_string(a.log) != csv_string(b.log))
    return {false, "CSV exports differ between identical runs"};

  const auto records = split_records(a.message_log);
  if (records.empty()) return {false, "no wire records captured"};
  std::mt19937_64 rng(4242);
  const int mutations = 100000;
  for (int i = 0; i < mutations; ++i) {
    std::vector<std::uint8_t> bytes = records[rng() % records.size()];
    const std::size_t pos = rng() % bytes.size();
    bytes[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try {
      (void)deserialize(bytes);
      return {false, "mutation " + std::to_string(i) + " accepted silently"};
    } catch (const WireError&) {
    }
  }
  return {true, "byte-identical reruns; 100000 single-byte mutations all "
                "rejected"};
}

}  // namespace

int main(int argc, char** argv) {
  using Criterion = Outcome (*)();
  const struct {
    const char* name;
    Criterion fn;
  } table[] = {
      {"crypto correctness", criterion1},
      {"automorphism scan", criterion2},
      {"perfect undetectability", criterion3},
      {"negative controls", criterion4},
      {"offset vectors", criterion5},
      {"collision reproduction", criterion6},
      {"mode equivalence", criterion7},
      {"determinism and wire", criterion8},
  };

  int first = 1, last = 8;
  if (argc > 1 && std::strcmp(argv[1], "all") != 0) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > 8) {
      std::cerr << "usage: acceptance [1-8|all]\n";
      return 64;
    }
    first = last = n;
  }

  bool all_pass = true;
  for (int n = first; n <= last; ++n) {
    Outcome outcome;
    try {
      outcome = table[n - 1].fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << " (" << table[n - 1].name
              << "): " << (outcome.pass ? "PASS" : "FAIL") << " - "
              << outcome.detail << "\n";
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
