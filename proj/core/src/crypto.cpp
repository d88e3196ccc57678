#include "tbt/crypto.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include <boost/multiprecision/integer.hpp>

namespace tbt {

namespace mp = boost::multiprecision;

BigInt DetRng::bits(unsigned n) {
  if (n == 0) throw std::invalid_argument("bits: n must be >= 1");
  BigInt out = 0;
  unsigned filled = 0;
  while (filled < n) {
    out <<= 64;
    out |= BigInt(eng_());
    filled += 64;
  }
  out >>= (filled - n);
  mp::bit_set(out, n - 1);
  return out;
}

BigInt DetRng::below(const BigInt& bound) {
  if (bound <= 0) throw std::invalid_argument("below: bound must be positive");
  const unsigned nbits = static_cast<unsigned>(mp::msb(bound)) + 1;
  while (true) {
    BigInt candidate = 0;
    unsigned filled = 0;
    while (filled < nbits) {
      candidate <<= 64;
      candidate |= BigInt(eng_());
      filled += 64;
    }
    candidate >>= (filled - nbits);
    if (candidate < bound) return candidate;
  }
}

BigInt DetRng::in_range(const BigInt& lo, const BigInt& hi) {
  if (lo >= hi) throw std::invalid_argument("in_range: empty range");
  return lo + below(hi - lo);
}

namespace {

const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<std::uint32_t> out;
    std::vector<bool> composite(2000, false);
    for (std::uint32_t i = 2; i < composite.size(); ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint32_t j = i * i; j < composite.size(); j += i)
        composite[j] = true;
    }
    return out;
  }();
  return primes;
}

bool passes_trial_division(const BigInt& n) {
  for (std::uint32_t p : small_primes()) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  return true;
}

}  // namespace

bool is_probable_prime(const BigInt& n, DetRng& rng, int rounds) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  if (!passes_trial_division(n)) return false;

  BigInt d = n - 1;
  unsigned r = 0;
  while (d % 2 == 0) {
    d >>= 1;
    ++r;
  }
  for (int i = 0; i < rounds; ++i) {
    const BigInt a = rng.in_range(2, n - 1);
    BigInt x = mp::powm(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (unsigned j = 1; j < r; ++j) {
      x = x * x % n;
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

KeyPair keygen(unsigned bits, std::uint64_t seed) {
  if (bits < 16 || bits > 2048)
    throw std::invalid_argument("keygen: bits must be in [16, 2048]");
  DetRng rng(seed);

  const unsigned max_attempts = 2000000;
  BigInt p, q;
  bool found = false;
  unsigned attempts = 0;
  for (; attempts < max_attempts; ++attempts) {
    q = rng.bits(bits - 1);
    mp::bit_set(q, 0);  // odd
    p = 2 * q + 1;
    if (!passes_trial_division(q) || !passes_trial_division(p)) continue;
    if (!is_probable_prime(q, rng) || !is_probable_prime(p, rng)) continue;
    found = true;
    break;
  }
  if (!found) {
    throw KeygenError("no safe prime found after " + std::to_string(attempts) +
                      " attempts");
  }

  // Any quadratic residue != 1 generates the order-q subgroup.
  BigInt gen;
  do {
    const BigInt x = rng.in_range(2, p - 1);
    gen = x * x % p;
  } while (gen == 1);

  KeyPair keys;
  keys.pk.p = p;
  keys.pk.q = q;
  keys.pk.gen = gen;
  keys.sk.s = rng.in_range(1, q);
  keys.pk.h = mp::powm(gen, keys.sk.s, p);
  return keys;
}

BigInt mod_inverse(const BigInt& a, const BigInt& modulus) {
  BigInt r0 = modulus, r1 = a % modulus, t0 = 0, t1 = 1;
  if (r1 < 0) r1 += modulus;
  while (r1 != 0) {
    const BigInt qt = r0 / r1;
    BigInt tmp = r0 - qt * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - qt * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (r0 != 1) throw std::invalid_argument("mod_inverse: not invertible");
  return t0 < 0 ? t0 + modulus : t0;
}

BigInt encode(double value, const EncodingParams& enc) {
  if (!std::isfinite(value)) throw EncodeOverflow("non-finite signal value");
  const double scaled = std::ldexp(value, static_cast<int>(enc.gamma));
  const BigInt q = (enc.p - 1) / 2;
  if (std::fabs(scaled) >= 9.0e18 ||
      BigInt(std::llabs(static_cast<long long>(scaled))) * 2 >= q) {
    throw EncodeOverflow("encoded magnitude exceeds q/2 headroom");
  }
  long long n = std::llround(scaled);
  if (n == 0) n = 1;  // 0 is not in Z_p*; one quantum, folded back by decode
  if (n > 0) return BigInt(n);
  return enc.p - BigInt(-n);
}

Decoded decode(const BigInt& m, const EncodingParams& enc) {
  const BigInt q = (enc.p - 1) / 2;
  BigInt residue = m % enc.p;
  if (residue < 0) residue += enc.p;
  BigInt signed_m = residue;
  if (2 * signed_m > enc.p) signed_m -= enc.p;

  Decoded out;
  if (signed_m == 1 || signed_m == -1) {
    out.value = 0.0;  // zero-quantum fold; keeps the map negation-symmetric
    return out;
  }
  if (2 * mp::abs(signed_m) >= q) out.implausible = true;
  out.value =
      std::ldexp(signed_m.convert_to<double>(), -static_cast<int>(enc.gamma));
  return out;
}

Ciphertext encrypt(const BigInt& m, const PublicKey& pk, const BigInt& r) {
  if (m < 1 || m > pk.p - 1)
    throw std::invalid_argument("encrypt: plaintext outside [1, p-1]");
  if (r < 1 || r >= pk.q)
    throw std::invalid_argument("encrypt: nonce outside [1, q-1]");
  const BigInt c1 = mp::powm(pk.gen, r, pk.p);
  const BigInt hr = mp::powm(pk.h, r, pk.p);
  return {c1, m * hr % pk.p};
}

BigInt decrypt(const Ciphertext& c, const SecretKey& sk, const PublicKey& pk) {
  if (c.c1 < 1 || c.c1 > pk.p - 1 || c.c2 < 1 || c.c2 > pk.p - 1)
    throw std::invalid_argument("decrypt: ciphertext component outside [1, p-1]");
  const BigInt mask = mp::powm(c.c1, sk.s, pk.p);
  return mod_inverse(mask, pk.p) * c.c2 % pk.p;
}

Ciphertext hom_mul(const Ciphertext& a, const Ciphertext& b,
                   const PublicKey& pk) {
  return {a.c1 * b.c1 % pk.p, a.c2 * b.c2 % pk.p};
}

Ciphertext malleate(const Ciphertext& c, const BigInt& k, const BigInt& p) {
  BigInt kk = k % p;
  if (kk < 0) kk += p;
  if (kk == 0) throw std::invalid_argument("malleate: k must be nonzero mod p");
  return {c.c1, kk * c.c2 % p};
}

void save_key_file(const std::string& path, const PublicKey& pk,
                   const SecretKey* sk) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open key file for writing: " + path);
  out << pk.p << "\n" << pk.q << "\n" << pk.gen << "\n" << pk.h << "\n";
  if (sk != nullptr) out << sk->s << "\n";
}

KeyPair load_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open key file: " + path);
  KeyPair keys;
  in >> keys.pk.p >> keys.pk.q >> keys.pk.gen >> keys.pk.h;
  if (!in) throw std::runtime_error("malformed key file: " + path);
  if (!(in >> keys.sk.s)) keys.sk.s = 0;
  return keys;
}

}  // namespace tbt
