#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "tbt/attacker.hpp"
#include "tbt/crypto.hpp"

namespace tbt {

enum class Direction : std::uint8_t { kL2F = 0, kF2L = 1 };

/// One control-tick datagram. `payload` holds 4 encoded integers in
/// plaintext mode or 8 residues (c1, c2 per slot) in ciphertext mode.
struct ChannelMessage {
  std::uint32_t seq = 0;
  std::uint32_t tick = 0;
  Direction direction = Direction::kL2F;
  std::vector<BigInt> payload;
};

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BadMagic : public WireError {
 public:
  using WireError::WireError;
};
class Truncated : public WireError {
 public:
  using WireError::WireError;
};
class CrcMismatch : public WireError {
 public:
  using WireError::WireError;
};
class BadSchema : public WireError {
 public:
  using WireError::WireError;
};

/// Wire format: magic "TBT1", version u8, direction u8, seq u32 LE,
/// tick u32 LE, count u8 (4 or 8), then per element a u16 LE length prefix
/// and big-endian magnitude bytes, then crc32 (u32 LE) of everything before.
std::vector<std::uint8_t> serialize(const ChannelMessage& msg);
ChannelMessage deserialize(const std::vector<std::uint8_t>& bytes);

/// Applies the per-direction attack to a message payload; seq and tick are
/// preserved. `active` gates delayed-onset experiments. In ciphertext mode
/// the proxy sees only the modulus, never generator, h, or the secret key.
ChannelMessage proxy_forward(const ChannelMessage& msg,
                             const AttackScenario& scenario,
                             const EncodingParams& enc, bool active);

struct LatencyModel {
  double base_delay = 0.010;  // s
  double jitter = 0.0;        // s, uniform in [0, jitter), seeded
  double drop_rate = 0.0;     // probability per message
};

/// Deterministic in-process transport for one direction. Messages sent at
/// tick k become visible to polls at ticks whose time is >= send time plus
/// delay; the receiver keeps the latest-seq message (stale ones counted).
class LoopbackLink {
 public:
  LoopbackLink(const LatencyModel& latency, double tick_period,
               std::uint64_t seed);

  void send(const ChannelMessage& msg, std::uint32_t send_tick);
  /// Latest deliverable message at `tick`, if any arrived since last poll.
  std::optional<ChannelMessage> poll(std::uint32_t tick);

  std::uint64_t stale_dropped() const { return stale_dropped_; }

 private:
  struct Pending {
    double arrival;
    ChannelMessage msg;
  };
  LatencyModel latency_;
  double tick_period_;
  std::mt19937_64 rng_;
  std::deque<Pending> queue_;
  std::int64_t last_seq_ = -1;
  std::uint64_t stale_dropped_ = 0;
};

/// Thin nonblocking UDP socket wrapper for the two-process/demo transport.
class UdpEndpoint {
 public:
  /// `listen` and `peer` are "host:port" strings; listen may be ":0".
  UdpEndpoint(const std::string& listen, const std::string& peer);
  ~UdpEndpoint();
  UdpEndpoint(const UdpEndpoint&) = delete;
  UdpEndpoint& operator=(const UdpEndpoint&) = delete;

  void send(const std::vector<std::uint8_t>& bytes);
  std::optional<std::vector<std::uint8_t>> try_receive();
  std::uint16_t bound_port() const { return bound_port_; }

 private:
  int fd_ = -1;
  std::uint16_t bound_port_ = 0;
};

/// Appends a length-prefixed (u32 LE) record to a message log stream.
void append_record(std::vector<std::uint8_t>& log,
                   const std::vector<std::uint8_t>& record);
std::vector<std::vector<std::uint8_t>> split_records(
    const std::vector<std::uint8_t>& log);

}  // namespace tbt
