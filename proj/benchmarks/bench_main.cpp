#include <benchmark/benchmark.h>

#include "tbt/channel.hpp"
#include "tbt/crypto.hpp"
#include "tbt/dynamics.hpp"

namespace {

void BM_StepRk4(benchmark::State& state) {
  tbt::ManipulatorParams params;
  tbt::JointState x{0.1, -0.2, 0.5, -0.3};
  const tbt::TorquePair tau{0.4, -0.1};
  const tbt::TorquePair ext{0.05, 0.02};
  for (auto _ : state) {
    x = tbt::step_rk4(x, tau, ext, params, 0.001);
    benchmark::DoNotOptimize(x);
    // Keep the state bounded so the loop never trips the divergence guard.
    if (std::abs(x.theta1) > 100.0) x = tbt::JointState{0.1, -0.2, 0.5, -0.3};
  }
}
BENCHMARK(BM_StepRk4);

void BM_Encrypt(benchmark::State& state) {
  const tbt::KeyPair keys = tbt::keygen(64, 7);
  const tbt::EncodingParams enc{16, keys.pk.p};
  const tbt::BigInt m = tbt::encode(0.123456, enc);
  tbt::DetRng rng(99);
  for (auto _ : state) {
    const tbt::BigInt r = rng.in_range(1, keys.pk.q);
    benchmark::DoNotOptimize(tbt::encrypt(m, keys.pk, r));
  }
}
BENCHMARK(BM_Encrypt);

void BM_Decrypt(benchmark::State& state) {
  const tbt::KeyPair keys = tbt::keygen(64, 7);
  const tbt::EncodingParams enc{16, keys.pk.p};
  const tbt::Ciphertext c =
      tbt::encrypt(tbt::encode(0.123456, enc), keys.pk, 123456789);
  for (auto _ : state)
    benchmark::DoNotOptimize(tbt::decrypt(c, keys.sk, keys.pk));
}
BENCHMARK(BM_Decrypt);

void BM_Malleate(benchmark::State& state) {
  const tbt::KeyPair keys = tbt::keygen(64, 7);
  const tbt::EncodingParams enc{16, keys.pk.p};
  const tbt::Ciphertext c =
      tbt::encrypt(tbt::encode(0.123456, enc), keys.pk, 123456789);
  const tbt::BigInt k = keys.pk.p - 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(tbt::malleate(c, k, keys.pk.p));
}
BENCHMARK(BM_Malleate);

void BM_SerializeRoundtrip(benchmark::State& state) {
  const tbt::KeyPair keys = tbt::keygen(64, 7);
  const tbt::EncodingParams enc{16, keys.pk.p};
  tbt::ChannelMessage msg;
  msg.seq = 42;
  msg.tick = 41;
  for (int i = 0; i < 4; ++i) {
    const tbt::Ciphertext c =
        tbt::encrypt(tbt::encode(0.1 * (i + 1), enc), keys.pk, 1000 + i);
    msg.payload.push_back(c.c1);
    msg.payload.push_back(c.c2);
  }
  for (auto _ : state) {
    const auto bytes = tbt::serialize(msg);
    benchmark::DoNotOptimize(tbt::deserialize(bytes));
  }
}
BENCHMARK(BM_SerializeRoundtrip);

}  // namespace

BENCHMARK_MAIN();
