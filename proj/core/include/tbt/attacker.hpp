#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "tbt/controller.hpp"
#include "tbt/crypto.hpp"

namespace tbt {

/// Exact rational per-slot gain; avoids drift between plaintext and
/// ciphertext attack modes (e.g. 1/2 maps to inv(2, p) on ciphertexts).
struct RationalGain {
  long long num = 1;
  long long den = 1;
};

/// One direction of the FDIA: attacked = S * signals + d.
/// In ciphertext mode S must be diagonal with exact rational entries and
/// d must be zero; the channel is multiplicative-only.
struct AffineAttack {
  Eigen::Matrix4d S = Eigen::Matrix4d::Identity();
  Eigen::Vector4d d = Eigen::Vector4d::Zero();
  std::optional<std::array<RationalGain, 4>> exact_diag;

  bool has_offset() const { return d.cwiseAbs().maxCoeff() != 0.0; }
};

enum class ScenarioName { kNormal, kReflection, kScaling };
enum class AttackMode { kPlaintext, kCiphertext };

struct AttackScenario {
  ScenarioName name = ScenarioName::kNormal;
  AffineAttack leader_dir;    // applied to follower->leader traffic (S_l, d_l)
  AffineAttack follower_dir;  // applied to leader->follower traffic (S_f, d_f)
  AttackMode mode = AttackMode::kCiphertext;
};

class UnsupportedCiphertextAttack : public std::runtime_error {
 public:
  explicit UnsupportedCiphertextAttack(const std::string& what)
      : std::runtime_error(what) {}
};

ScenarioName scenario_from_name(const std::string& name);
std::string to_string(ScenarioName name);

/// Builds the named scenario. The reflection offsets are 2*theta1(0) of the
/// robot whose signals travel on the respective direction; they vanish under
/// zero initial conditions.
AttackScenario scenario_config(ScenarioName name, double theta1l_initial = 0.0,
                               double theta1f_initial = 0.0,
                               AttackMode mode = AttackMode::kCiphertext);

/// Plaintext-mode attack on real-valued signals: S*v + d.
SignalVector apply_affine_plaintext(const SignalVector& v, const AffineAttack& a);

/// Plaintext-mode attack on fixed-point wire integers. Uses exact rational
/// arithmetic when available so results stay bit-compatible with the
/// ciphertext path; falls back to decode/transform/encode otherwise.
std::array<BigInt, 4> apply_affine_encoded(const std::array<BigInt, 4>& slots,
                                           const AffineAttack& a,
                                           const EncodingParams& enc);

/// Ciphertext-mode attack via malleability; needs only the modulus, never a
/// key. Throws UnsupportedCiphertextAttack for non-diagonal S or d != 0.
CipherVector apply_malleability(const CipherVector& cv, const AffineAttack& a,
                                const BigInt& p);

}  // namespace tbt
