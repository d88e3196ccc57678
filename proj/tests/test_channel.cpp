#include <doctest.h>

#include <random>

#include "tbt/channel.hpp"

using namespace tbt;

namespace {

ChannelMessage sample_message(std::size_t slots) {
  ChannelMessage msg;
  msg.seq = 42;
  msg.tick = 41;
  msg.direction = Direction::kF2L;
  for (std::size_t i = 0; i < slots; ++i)
    msg.payload.push_back(BigInt("123456789012345678901234567890") + (int)i);
  return msg;
}

}  // namespace

TEST_CASE("serialize / deserialize roundtrip") {
  for (std::size_t slots : {4u, 8u}) {
    const ChannelMessage msg = sample_message(slots);
    const ChannelMessage back = deserialize(serialize(msg));
    CHECK(back.seq == msg.seq);
    CHECK(back.tick == msg.tick);
    CHECK(back.direction == msg.direction);
    REQUIRE(back.payload.size() == slots);
    for (std::size_t i = 0; i < slots; ++i)
      CHECK(back.payload[i] == msg.payload[i]);
  }
}

TEST_CASE("wire errors are distinguishable") {
  auto bytes = serialize(sample_message(4));

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_AS(deserialize(bytes), BadMagic);
  }
  SUBCASE("truncation") {
    bytes.resize(bytes.size() - 3);
    CHECK_THROWS_AS(deserialize(bytes), Truncated);
  }
  SUBCASE("crc corruption") {
    bytes[bytes.size() - 6] ^= 0x01;  // inside the last payload element
    CHECK_THROWS_AS(deserialize(bytes), CrcMismatch);
  }
  SUBCASE("bad element count") {
    ChannelMessage msg = sample_message(4);
    msg.payload.push_back(7);
    CHECK_THROWS_AS(serialize(msg), BadSchema);
  }
  SUBCASE("trailing garbage") {
    bytes.push_back(0);
    CHECK_THROWS_AS(deserialize(bytes), BadSchema);
  }
  SUBCASE("unsupported version") {
    bytes[4] = 9;
    CHECK_THROWS_AS(deserialize(bytes), WireError);
  }
}

TEST_CASE("single-byte fuzz never passes silently") {
  const auto bytes = serialize(sample_message(8));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    auto mutated = bytes;
    const std::size_t pos = rng() % mutated.size();
    const std::uint8_t flip = static_cast<std::uint8_t>(1 + rng() % 255);
    mutated[pos] ^= flip;
    CHECK_THROWS_AS(deserialize(mutated), WireError);
  }
}

TEST_CASE("proxy preserves framing and c1") {
  KeyPair k;
  k.pk.p = 23;
  k.pk.q = 11;
  k.pk.gen = 2;
  k.sk.s = 3;
  k.pk.h = 8;
  const EncodingParams enc{4, k.pk.p};
  const AttackScenario sc = scenario_config(ScenarioName::kReflection, 0.0, 0.0,
                                            AttackMode::kCiphertext);

  ChannelMessage msg;
  msg.seq = 7;
  msg.tick = 6;
  msg.direction = Direction::kL2F;
  for (int i = 0; i < 4; ++i) {
    const Ciphertext c = encrypt(4, k.pk, 5);
    msg.payload.push_back(c.c1);
    msg.payload.push_back(c.c2);
  }

  const ChannelMessage out = proxy_forward(msg, sc, enc, true);
  CHECK(out.seq == msg.seq);
  CHECK(out.tick == msg.tick);
  REQUIRE(out.payload.size() == 8);
  for (int i = 0; i < 4; ++i) CHECK(out.payload[2 * i] == msg.payload[2 * i]);
  CHECK(decrypt({out.payload[0], out.payload[1]}, k.sk, k.pk) == 19);

  SUBCASE("inactive proxy is the identity") {
    const ChannelMessage idle = proxy_forward(msg, sc, enc, false);
    for (std::size_t i = 0; i < 8; ++i)
      CHECK(idle.payload[i] == msg.payload[i]);
  }
}

TEST_CASE("loopback link delivery times") {
  const double tick = 0.02;

  SUBCASE("10 ms base delay lands on the next tick") {
    LoopbackLink link({0.010, 0.0, 0.0}, tick, 1);
    link.send(sample_message(4), 5);
    CHECK_FALSE(link.poll(5).has_value());
    const auto got = link.poll(6);
    REQUIRE(got.has_value());
    CHECK(got->seq == 42);
  }

  SUBCASE("zero delay delivers in the same tick") {
    LoopbackLink link({0.0, 0.0, 0.0}, tick, 1);
    link.send(sample_message(4), 5);
    CHECK(link.poll(5).has_value());
  }

  SUBCASE("latest sequence wins, stale ones are counted") {
    LoopbackLink link({0.010, 0.0, 0.0}, tick, 1);
    ChannelMessage a = sample_message(4);
    a.seq = 1;
    ChannelMessage b = sample_message(4);
    b.seq = 2;
    link.send(a, 3);
    link.send(b, 3);
    const auto got = link.poll(10);
    REQUIRE(got.has_value());
    CHECK(got->seq == 2);
    // A message older than one already delivered is dropped on arrival.
    ChannelMessage c = sample_message(4);
    c.seq = 1;
    link.send(c, 10);
    CHECK_FALSE(link.poll(12).has_value());
    CHECK(link.stale_dropped() == 1);
  }

  SUBCASE("drop rate 1 drops everything") {
    LoopbackLink link({0.0, 0.0, 1.0}, tick, 1);
    for (int i = 0; i < 10; ++i) link.send(sample_message(4), i);
    for (int i = 0; i < 20; ++i) CHECK_FALSE(link.poll(i).has_value());
  }
}

TEST_CASE("record log framing") {
  std::vector<std::uint8_t> log;
  const auto a = serialize(sample_message(4));
  const auto b = serialize(sample_message(8));
  append_record(log, a);
  append_record(log, b);
  const auto records = split_records(log);
  REQUIRE(records.size() == 2);
  CHECK(records[0] == a);
  CHECK(records[1] == b);

  log.pop_back();
  CHECK_THROWS_AS(split_records(log), Truncated);
}

TEST_CASE("udp endpoints exchange datagrams on localhost") {
  UdpEndpoint c("127.0.0.1:45901", "127.0.0.1:45902");
  UdpEndpoint d("127.0.0.1:45902", "127.0.0.1:45901");
  const auto bytes = serialize(sample_message(4));
  c.send(bytes);
  std::optional<std::vector<std::uint8_t>> got;
  for (int i = 0; i < 100 && !got; ++i) got = d.try_receive();
  REQUIRE(got.has_value());
  CHECK(*got == bytes);
  CHECK(deserialize(*got).seq == 42);
}
