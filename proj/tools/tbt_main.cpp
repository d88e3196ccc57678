#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tbt/attackability.hpp"
#include "tbt/config.hpp"
#include "tbt/harness.hpp"

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitDetected = 2;
constexpr int kExitError = 3;
constexpr int kExitUsage = 64;

struct RunArgs {
  tbt::RunConfig cfg;
  std::string config_file;
  std::vector<std::string> overrides;  // key=value
  std::string out_dir = "out";
  bool json_output = false;
  bool show = false;
  bool plots = true;
};

void apply_overrides(tbt::RunConfig& cfg,
                     const std::vector<std::string>& overrides) {
  for (const std::string& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw tbt::ConfigError("--set expects key=value, got: " + entry);
    tbt::apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
  }
}

json verify_json(const tbt::VerifyReport& r, double tol) {
  json j;
  j["pass"] = r.pass;
  j["leader_clause_pass"] = r.leader_clause_pass;
  j["follower_clause_pass"] = r.follower_clause_pass;
  j["follower_mirrored"] = r.follower_mirrored;
  j["shape_mismatch"] = r.shape_mismatch;
  j["max_leader_diff"] = r.max_leader_diff;
  j["max_follower_diff"] = r.max_follower_diff;
  j["ticks_compared"] = r.ticks_compared;
  j["attacked_implausible"] = r.attacked_implausible;
  j["tolerance"] = tol;
  j["per_quantity"] = r.per_quantity;
  return j;
}

int cmd_run(const RunArgs& args, CLI::App* sub) {
  tbt::RunConfig cfg;
  if (!args.config_file.empty()) tbt::load_config_file(cfg, args.config_file);
  apply_overrides(cfg, args.overrides);
  // Direct flags win over both the file and --set entries.
  for (const auto& [key, opt_name] :
       std::vector<std::pair<std::string, std::string>>{
           {"scenario.name", "--scenario"},
           {"scenario.mode", "--mode"},
           {"scenario.seed", "--seed"},
           {"scenario.duration", "--duration"},
           {"scenario.onset_time", "--onset"},
           {"encoding.gamma", "--gamma"},
           {"keys.file", "--key-file"},
           {"transport.kind", "--transport"}}) {
    const CLI::Option* opt = sub->get_option(opt_name);
    if (opt->count() > 0)
      tbt::apply_config_entry(cfg, key, opt->results().front());
  }
  if (const CLI::Option* wall = sub->get_option("--wall"); wall->count() > 0) {
    tbt::apply_config_entry(cfg, "wall.yaw_enabled", wall->results().front());
    tbt::apply_config_entry(cfg, "wall.pitch_enabled", wall->results().front());
  }

  if (args.show) {
    std::cout << tbt::show_config(cfg);
    return kExitPass;
  }

  const tbt::RunResult result = tbt::run_scenario(cfg);
  std::filesystem::create_directories(args.out_dir);
  tbt::export_csv(result.log, args.out_dir + "/trace.csv");
  {
    std::ofstream out(args.out_dir + "/messages.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(result.message_log.data()),
              static_cast<std::streamsize>(result.message_log.size()));
    if (!out) throw std::runtime_error("cannot write messages.bin");
  }
  if (args.plots) tbt::emit_plots(result.log, args.out_dir);

  if (args.json_output) {
    json j;
    j["scenario"] = tbt::to_string(cfg.scenario);
    j["mode"] =
        cfg.mode == tbt::AttackMode::kPlaintext ? "plaintext" : "ciphertext";
    j["ticks"] = result.log.rows.size();
    j["diverged"] = result.log.diverged;
    j["implausible_total"] = result.implausible_total;
    j["trace"] = args.out_dir + "/trace.csv";
    j["messages"] = args.out_dir + "/messages.bin";
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "scenario " << tbt::to_string(cfg.scenario) << " ("
              << (cfg.mode == tbt::AttackMode::kPlaintext ? "plaintext"
                                                          : "ciphertext")
              << "): " << result.log.rows.size() << " ticks"
              << (result.log.diverged ? ", DIVERGED" : "") << ", "
              << result.implausible_total
              << " implausible decodes; wrote " << args.out_dir
              << "/trace.csv\n";
  }
  return result.log.diverged ? kExitError : kExitPass;
}

int cmd_verify(const std::string& baseline_path,
               const std::string& attacked_path, double tol, bool json_output) {
  const tbt::TraceLog baseline = tbt::load_csv(baseline_path);
  const tbt::TraceLog attacked = tbt::load_csv(attacked_path);
  const tbt::VerifyReport report =
      tbt::verify_undetectable(baseline, attacked, tol);
  if (json_output) {
    std::cout << verify_json(report, tol).dump(2) << "\n";
  } else {
    std::cout << (report.pass ? "UNDETECTED" : "DETECTED")
              << ": leader max diff " << report.max_leader_diff
              << ", follower max diff " << report.max_follower_diff
              << (report.follower_mirrored ? " (mirror branch)" : "") << ", "
              << report.ticks_compared << " ticks, "
              << report.attacked_implausible << " implausible decodes\n";
  }
  return report.pass ? kExitPass : kExitDetected;
}

int cmd_check_automorphism(int samples, double tol, std::uint64_t seed,
                           bool gravity_comp, bool json_output) {
  tbt::ManipulatorParams params;
  const auto results =
      tbt::enumerate_sign_candidates(params, gravity_comp, samples, tol, seed);
  json out = json::array();
  bool yaw_mirror_pass = false;
  for (const auto& [cand, report] : results) {
    json j;
    j["phi_x"] = {cand.phi_x_diag[0], cand.phi_x_diag[1]};
    j["pass"] = report.pass;
    j["max_residual"] = report.max_residual;
    out.push_back(j);
    if (cand.phi_x_diag[0] == -1.0 && cand.phi_x_diag[1] == 1.0 && report.pass)
      yaw_mirror_pass = true;
    if (!json_output)
      std::cout << "phi = diag(" << cand.phi_x_diag[0] << ", "
                << cand.phi_x_diag[1] << "): "
                << (report.pass ? "automorphism" : "not an automorphism")
                << " (max residual " << report.max_residual << ")\n";
  }
  if (json_output) std::cout << out.dump(2) << "\n";
  return yaw_mirror_pass ? kExitPass : kExitDetected;
}

int cmd_keygen(unsigned bits, std::uint64_t seed, const std::string& out_path,
               bool with_secret, bool json_output) {
  const tbt::KeyPair keys = tbt::keygen(bits, seed);
  tbt::save_key_file(out_path, keys.pk, with_secret ? &keys.sk : nullptr);
  if (json_output) {
    json j;
    j["p"] = keys.pk.p.str();
    j["q"] = keys.pk.q.str();
    j["gen"] = keys.pk.gen.str();
    j["h"] = keys.pk.h.str();
    j["file"] = out_path;
    j["secret_included"] = with_secret;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "wrote " << out_path << " (p = " << keys.pk.p
              << (with_secret ? ", with secret)" : ", public only)") << "\n";
  }
  return kExitPass;
}

int cmd_inspect_wire(const std::string& path, const std::string& key_path,
                     unsigned gamma, bool json_output) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  std::optional<tbt::KeyPair> keys;
  if (!key_path.empty()) keys = tbt::load_key_file(key_path);

  json out = json::array();
  for (const auto& record : tbt::split_records(bytes)) {
    const tbt::ChannelMessage msg = tbt::deserialize(record);
    json j;
    j["seq"] = msg.seq;
    j["tick"] = msg.tick;
    j["direction"] = msg.direction == tbt::Direction::kL2F ? "l2f" : "f2l";
    j["slots"] = msg.payload.size();
    json residues = json::array();
    for (const tbt::BigInt& v : msg.payload) residues.push_back(v.str());
    j["payload"] = residues;
    if (keys && keys->sk.s != 0) {
      const tbt::EncodingParams enc{gamma, keys->pk.p};
      json values = json::array();
      for (std::size_t i = 0; i < msg.payload.size();
           i += msg.payload.size() == 8 ? 2 : 1) {
        tbt::BigInt m = msg.payload[i];
        if (msg.payload.size() == 8)
          m = tbt::decrypt({msg.payload[i], msg.payload[i + 1]}, keys->sk,
                           keys->pk);
        const tbt::Decoded d = tbt::decode(m, enc);
        json v;
        v["value"] = d.value;
        v["implausible"] = d.implausible;
        values.push_back(v);
      }
      j["decoded"] = values;
    }
    out.push_back(j);
  }
  if (json_output) {
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& j : out) {
      std::cout << j["direction"].get<std::string>() << " seq "
                << j["seq"].get<std::uint32_t>() << " tick "
                << j["tick"].get<std::uint32_t>() << " slots "
                << j["slots"].get<std::size_t>();
      if (j.contains("decoded")) {
        std::cout << " ->";
        for (const auto& v : j["decoded"])
          std::cout << ' ' << v["value"].get<double>();
      }
      std::cout << "\n";
    }
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Deterministic testbed for stealthy false-data injection on an "
      "encrypted 4-channel bilateral teleoperation loop"};
  app.require_subcommand(1);

  RunArgs run_args;
  std::array<std::string, 9> direct;  // raw values, applied via config keys
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario end to end");
  run->add_option("--scenario", direct[0], "normal, reflection or scaling");
  run->add_option("--mode", direct[1], "plaintext or ciphertext");
  run->add_option("--wall", direct[8],
                  "on|off: virtual walls on both axes at the follower");
  run->add_option("--seed", direct[2], "RNG seed (keys, nonces, jitter)");
  run->add_option("--duration", direct[3], "simulated seconds");
  run->add_option("--onset", direct[4], "attack onset time, seconds");
  run->add_option("--gamma", direct[5], "fixed-point fractional bits");
  run->add_option("--key-file", direct[6], "load keys instead of seeded keygen");
  run->add_option("--transport", direct[7], "loopback or udp");
  run->add_option("--config", run_args.config_file, "INI config file");
  run->add_option("--set", run_args.overrides,
                  "override one config entry, section.key=value");
  run->add_option("-o,--out", run_args.out_dir, "output directory");
  run->add_flag("--json", run_args.json_output, "machine-readable summary");
  run->add_flag("--show-config", run_args.show,
                "print the effective configuration and exit");
  run->add_flag("!--no-plots", run_args.plots, "skip SVG plot output");

  std::string baseline_path, attacked_path;
  double verify_tol = 1e-9;
  bool verify_json_out = false;
  CLI::App* verify = app.add_subcommand(
      "verify", "Compare an attacked trace against a baseline");
  verify->add_option("--baseline", baseline_path, "baseline trace.csv")
      ->required();
  verify->add_option("--attacked", attacked_path, "attacked trace.csv")
      ->required();
  verify->add_option("--tol", verify_tol, "per-sample tolerance");
  verify->add_flag("--json", verify_json_out, "machine-readable report");

  int auto_samples = 1000;
  double auto_tol = 1e-9;
  std::uint64_t auto_seed = 20240901;
  bool auto_gravity_comp = true;
  bool auto_json = false;
  CLI::App* check = app.add_subcommand(
      "check-automorphism",
      "Numerically test candidate state-space symmetries of the dynamics");
  check->add_option("--samples", auto_samples, "random samples per candidate");
  check->add_option("--tol", auto_tol, "residual tolerance");
  check->add_option("--seed", auto_seed, "sampling seed");
  check->add_flag("!--no-gravity-comp", auto_gravity_comp,
                  "test the raw dynamics, without gravity compensation");
  check->add_flag("--json", auto_json, "machine-readable report");

  unsigned kg_bits = 64;
  std::uint64_t kg_seed = 1;
  std::string kg_out = "keys.txt";
  bool kg_secret = false;
  bool kg_json = false;
  CLI::App* kg = app.add_subcommand("keygen", "Generate an ElGamal key file");
  kg->add_option("--bits", kg_bits, "modulus size in bits");
  kg->add_option("--seed", kg_seed, "deterministic keygen seed");
  kg->add_option("-o,--out", kg_out, "output key file");
  kg->add_flag("--with-secret", kg_secret, "include the secret exponent");
  kg->add_flag("--json", kg_json, "machine-readable output");

  std::string iw_path, iw_key;
  unsigned iw_gamma = 16;
  bool iw_json = false;
  CLI::App* iw = app.add_subcommand(
      "inspect-wire", "Decode a recorded message log (messages.bin)");
  iw->add_option("--file", iw_path, "message log file")->required();
  iw->add_option("--key-file", iw_key,
                 "key file with secret, enables decryption");
  iw->add_option("--gamma", iw_gamma, "fixed-point fractional bits");
  iw->add_flag("--json", iw_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args, run);
    if (verify->parsed())
      return cmd_verify(baseline_path, attacked_path, verify_tol,
                        verify_json_out);
    if (check->parsed())
      return cmd_check_automorphism(auto_samples, auto_tol, auto_seed,
                                    auto_gravity_comp, auto_json);
    if (kg->parsed())
      return cmd_keygen(kg_bits, kg_seed, kg_out, kg_secret, kg_json);
    if (iw->parsed())
      return cmd_inspect_wire(iw_path, iw_key, iw_gamma, iw_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
