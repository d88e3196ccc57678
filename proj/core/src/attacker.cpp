#include "tbt/attacker.hpp"

#include <cmath>

namespace tbt {

namespace {

std::array<RationalGain, 4> uniform_diag(long long num, long long den) {
  return {RationalGain{num, den}, RationalGain{num, den}, RationalGain{num, den},
          RationalGain{num, den}};
}

// Symmetric rounding (half away from zero), matching std::llround.
BigInt round_div(const BigInt& a, long long den) {
  const BigInt b = den;
  if (a >= 0) return (2 * a + b) / (2 * b);
  return (2 * a - b) / (2 * b);
}

BigInt signed_residue(const BigInt& m, const BigInt& p) {
  BigInt r = m % p;
  if (r < 0) r += p;
  if (2 * r > p) r -= p;
  return r;
}

BigInt to_wire(BigInt n, const BigInt& p) {
  if (n == 0) n = 1;  // zero rule, same as encode()
  n %= p;
  if (n <= 0) n += p;
  return n;
}

}  // namespace

ScenarioName scenario_from_name(const std::string& name) {
  if (name == "normal") return ScenarioName::kNormal;
  if (name == "reflection") return ScenarioName::kReflection;
  if (name == "scaling") return ScenarioName::kScaling;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string to_string(ScenarioName name) {
  switch (name) {
    case ScenarioName::kNormal: return "normal";
    case ScenarioName::kReflection: return "reflection";
    case ScenarioName::kScaling: return "scaling";
  }
  return "?";
}

AttackScenario scenario_config(ScenarioName name, double theta1l_initial,
                               double theta1f_initial, AttackMode mode) {
  AttackScenario sc;
  sc.name = name;
  sc.mode = mode;
  switch (name) {
    case ScenarioName::kNormal:
      sc.leader_dir.exact_diag = uniform_diag(1, 1);
      sc.follower_dir.exact_diag = uniform_diag(1, 1);
      break;
    case ScenarioName::kReflection: {
      const Eigen::Vector4d diag(-1.0, 1.0, -1.0, 1.0);
      sc.leader_dir.S = diag.asDiagonal();
      sc.follower_dir.S = diag.asDiagonal();
      sc.leader_dir.d = Eigen::Vector4d(2.0 * theta1f_initial, 0.0, 0.0, 0.0);
      sc.follower_dir.d = Eigen::Vector4d(2.0 * theta1l_initial, 0.0, 0.0, 0.0);
      sc.leader_dir.exact_diag = {RationalGain{-1, 1}, RationalGain{1, 1},
                                  RationalGain{-1, 1}, RationalGain{1, 1}};
      sc.follower_dir.exact_diag = sc.leader_dir.exact_diag;
      break;
    }
    case ScenarioName::kScaling:
      sc.leader_dir.S = Eigen::Vector4d(2, 2, 2, 2).asDiagonal();
      sc.follower_dir.S = Eigen::Vector4d(0.5, 0.5, 0.5, 0.5).asDiagonal();
      sc.leader_dir.exact_diag = uniform_diag(2, 1);
      sc.follower_dir.exact_diag = uniform_diag(1, 2);
      break;
  }
  return sc;
}

SignalVector apply_affine_plaintext(const SignalVector& v, const AffineAttack& a) {
  const auto s = v.slots();
  const Eigen::Vector4d in(s[0], s[1], s[2], s[3]);
  const Eigen::Vector4d out = a.S * in + a.d;
  return SignalVector::from_slots({out[0], out[1], out[2], out[3]});
}

std::array<BigInt, 4> apply_affine_encoded(const std::array<BigInt, 4>& slots,
                                           const AffineAttack& a,
                                           const EncodingParams& enc) {
  std::array<BigInt, 4> out;
  if (a.exact_diag) {
    for (int i = 0; i < 4; ++i) {
      const RationalGain g = (*a.exact_diag)[i];
      const BigInt n = signed_residue(slots[i], enc.p);
      BigInt scaled = round_div(n * g.num, g.den);
      const long long d_int =
          std::llround(std::ldexp(a.d[i], static_cast<int>(enc.gamma)));
      out[i] = to_wire(scaled + d_int, enc.p);
    }
    return out;
  }
  // General matrix: transform the decoded real vector and re-encode.
  std::array<double, 4> v;
  for (int i = 0; i < 4; ++i) v[i] = decode(slots[i], enc).value;
  const SignalVector attacked =
      apply_affine_plaintext(SignalVector::from_slots(v), a);
  const auto av = attacked.slots();
  for (int i = 0; i < 4; ++i) out[i] = encode(av[i], enc);
  return out;
}

CipherVector apply_malleability(const CipherVector& cv, const AffineAttack& a,
                                const BigInt& p) {
  if (!a.exact_diag || !a.S.isDiagonal(0.0)) {
    throw UnsupportedCiphertextAttack(
        "ciphertext-mode attacks require a diagonal S with exact gains");
  }
  if (a.has_offset()) {
    throw UnsupportedCiphertextAttack(
        "additive offsets are not expressible through multiplicative "
        "malleability");
  }
  CipherVector out;
  for (int i = 0; i < 4; ++i) {
    const RationalGain g = (*a.exact_diag)[i];
    BigInt num = BigInt(g.num) % p;
    if (num < 0) num += p;
    const BigInt k = num * mod_inverse(BigInt(g.den), p) % p;
    out[i] = malleate(cv[i], k, p);
  }
  return out;
}

}  // namespace tbt
