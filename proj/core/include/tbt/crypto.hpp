#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace tbt {

using BigInt = boost::multiprecision::cpp_int;

/// ElGamal public key over the order-q subgroup of Z_p*, p = 2q+1 safe prime.
struct PublicKey {
  BigInt p;    // safe prime
  BigInt q;    // (p-1)/2, prime
  BigInt gen;  // generator of the order-q subgroup (a quadratic residue)
  BigInt h;    // gen^s mod p
};

struct SecretKey {
  BigInt s;  // in (0, q)
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

struct Ciphertext {
  BigInt c1;
  BigInt c2;
};

using CipherVector = std::array<Ciphertext, 4>;

/// Fixed-point signal encoding into Z_p*: m = round(v * 2^gamma) mod p,
/// negatives as p - |.|. Exact zero maps to m = 1 (one quantum) and decode
/// folds +-1 back to zero so that negation mod p is an involution on all
/// encodable values, including zero.
struct EncodingParams {
  unsigned gamma = 16;  // fractional bits
  BigInt p;             // modulus used for the signed mapping
};

struct Decoded {
  double value = 0.0;
  bool implausible = false;  // |signed residue| >= q/2: outside any sane signal
};

class EncodeOverflow : public std::runtime_error {
 public:
  explicit EncodeOverflow(const std::string& what) : std::runtime_error(what) {}
};

class KeygenError : public std::runtime_error {
 public:
  explicit KeygenError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic big-integer RNG; every stochastic crypto operation draws
/// from an explicit instance so full-system traces are reproducible.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t word() { return eng_(); }
  /// Uniform integer with exactly `n` bits (top bit set), n >= 1.
  BigInt bits(unsigned n);
  /// Uniform integer in [0, bound), bound > 0, by rejection sampling.
  BigInt below(const BigInt& bound);
  /// Uniform integer in [lo, hi), lo < hi.
  BigInt in_range(const BigInt& lo, const BigInt& hi);

 private:
  std::mt19937_64 eng_;
};

/// Miller-Rabin with `rounds` random bases; error probability < 4^-rounds.
bool is_probable_prime(const BigInt& n, DetRng& rng, int rounds = 40);

/// Deterministic safe-prime ElGamal keygen: p has `bits` bits, q = (p-1)/2.
/// Throws KeygenError when no safe prime is found within the retry budget.
KeyPair keygen(unsigned bits, std::uint64_t seed);

BigInt mod_inverse(const BigInt& a, const BigInt& modulus);

BigInt encode(double value, const EncodingParams& enc);
Decoded decode(const BigInt& m, const EncodingParams& enc);

Ciphertext encrypt(const BigInt& m, const PublicKey& pk, const BigInt& r);
BigInt decrypt(const Ciphertext& c, const SecretKey& sk, const PublicKey& pk);
Ciphertext hom_mul(const Ciphertext& a, const Ciphertext& b, const PublicKey& pk);

/// Malleability primitive: c' = (c1, k*c2 mod p). Needs only the modulus.
Ciphertext malleate(const Ciphertext& c, const BigInt& k, const BigInt& p);

/// Key file format: decimal big-integer text fields, newline separated, in
/// the order p, q, gen, h and optionally s.
void save_key_file(const std::string& path, const PublicKey& pk,
                   const SecretKey* sk);
KeyPair load_key_file(const std::string& path);  // sk.s = 0 when absent

}  // namespace tbt
