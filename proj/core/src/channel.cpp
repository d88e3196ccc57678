#include "tbt/channel.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>
#include <zlib.h>

#include <cstring>

#include <boost/multiprecision/cpp_int.hpp>

namespace tbt {

namespace {

constexpr std::uint8_t kVersion = 1;
constexpr char kMagic[4] = {'T', 'B', 'T', '1'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  const std::uint8_t* raw(std::size_t len) {
    need(len);
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += len;
    return p;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw Truncated("message truncated");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const ChannelMessage& msg) {
  if (msg.payload.size() != 4 && msg.payload.size() != 8)
    throw BadSchema("payload must contain 4 or 8 integers");
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(msg.direction));
  put_u32(out, msg.seq);
  put_u32(out, msg.tick);
  out.push_back(static_cast<std::uint8_t>(msg.payload.size()));
  for (const BigInt& value : msg.payload) {
    if (value < 0 || (value > 0 && boost::multiprecision::msb(value) >= 2048))
      throw BadSchema("payload integer outside [0, 2^2048)");
    std::vector<std::uint8_t> be;
    BigInt v = value;
    while (v != 0) {
      be.push_back(static_cast<std::uint8_t>(v & 0xff));
      v >>= 8;
    }
    put_u16(out, static_cast<std::uint16_t>(be.size()));
    out.insert(out.end(), be.rbegin(), be.rend());
  }
  put_u32(out, crc32_of(out.data(), out.size()));
  return out;
}

ChannelMessage deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader reader(bytes);
  const std::uint8_t* magic = reader.raw(4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw BadMagic("bad magic");
  const std::uint8_t version = reader.u8();
  if (version != kVersion) throw BadSchema("unsupported version");

  ChannelMessage msg;
  const std::uint8_t dir = reader.u8();
  if (dir > 1) throw BadSchema("bad direction byte");
  msg.direction = static_cast<Direction>(dir);
  msg.seq = reader.u32();
  msg.tick = reader.u32();
  const std::uint8_t count = reader.u8();
  if (count != 4 && count != 8) throw BadSchema("count must be 4 or 8");
  msg.payload.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::uint16_t len = reader.u16();
    const std::uint8_t* data = reader.raw(len);
    BigInt v = 0;
    for (std::uint16_t j = 0; j < len; ++j) {
      v <<= 8;
      v |= data[j];
    }
    msg.payload.push_back(std::move(v));
  }
  const std::size_t body_len = reader.pos();
  const std::uint32_t stored_crc = reader.u32();
  if (reader.pos() != bytes.size()) throw BadSchema("trailing bytes");
  if (crc32_of(bytes.data(), body_len) != stored_crc)
    throw CrcMismatch("crc mismatch");
  return msg;
}

ChannelMessage proxy_forward(const ChannelMessage& msg,
                             const AttackScenario& scenario,
                             const EncodingParams& enc, bool active) {
  ChannelMessage out = msg;
  if (!active) return out;
  const AffineAttack& attack = msg.direction == Direction::kF2L
                                   ? scenario.leader_dir
                                   : scenario.follower_dir;
  if (msg.payload.size() == 4) {
    std::array<BigInt, 4> slots{msg.payload[0], msg.payload[1], msg.payload[2],
                                msg.payload[3]};
    const auto attacked = apply_affine_encoded(slots, attack, enc);
    out.payload.assign(attacked.begin(), attacked.end());
  } else if (msg.payload.size() == 8) {
    CipherVector cv;
    for (int i = 0; i < 4; ++i)
      cv[i] = Ciphertext{msg.payload[2 * i], msg.payload[2 * i + 1]};
    const CipherVector attacked = apply_malleability(cv, attack, enc.p);
    out.payload.clear();
    for (int i = 0; i < 4; ++i) {
      out.payload.push_back(attacked[i].c1);
      out.payload.push_back(attacked[i].c2);
    }
  } else {
    throw BadSchema("payload must contain 4 or 8 integers");
  }
  return out;
}

LoopbackLink::LoopbackLink(const LatencyModel& latency, double tick_period,
                           std::uint64_t seed)
    : latency_(latency), tick_period_(tick_period), rng_(seed) {}

void LoopbackLink::send(const ChannelMessage& msg, std::uint32_t send_tick) {
  if (latency_.drop_rate > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng_) < latency_.drop_rate) return;
  }
  double delay = latency_.base_delay;
  if (latency_.jitter > 0.0) {
    std::uniform_real_distribution<double> u(0.0, latency_.jitter);
    delay += u(rng_);
  }
  queue_.push_back({send_tick * tick_period_ + delay, msg});
}

std::optional<ChannelMessage> LoopbackLink::poll(std::uint32_t tick) {
  const double now = tick * tick_period_;
  std::optional<ChannelMessage> latest;
  while (!queue_.empty() && queue_.front().arrival <= now) {
    ChannelMessage msg = std::move(queue_.front().msg);
    queue_.pop_front();
    if (static_cast<std::int64_t>(msg.seq) <= last_seq_) {
      ++stale_dropped_;
      continue;
    }
    last_seq_ = msg.seq;
    latest = std::move(msg);
  }
  return latest;
}

namespace {

std::pair<std::string, std::uint16_t> split_hostport(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("expected host:port, got: " + s);
  std::string host = s.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  return {host, static_cast<std::uint16_t>(std::stoi(s.substr(colon + 1)))};
}

}  // namespace

UdpEndpoint::UdpEndpoint(const std::string& listen, const std::string& peer) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw std::runtime_error("socket() failed");

  const auto [lhost, lport] = split_hostport(listen);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(lport);
  if (::inet_pton(AF_INET, lhost.c_str(), &addr.sin_addr) != 1)
    throw std::invalid_argument("bad listen address: " + lhost);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd_);
    throw std::runtime_error("bind() failed for " + listen);
  }
  sockaddr_in bound{};
  socklen_t blen = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &blen);
  bound_port_ = ntohs(bound.sin_port);

  const auto [phost, pport] = split_hostport(peer);
  sockaddr_in paddr{};
  paddr.sin_family = AF_INET;
  paddr.sin_port = htons(pport);
  if (::inet_pton(AF_INET, phost.c_str(), &paddr.sin_addr) != 1)
    throw std::invalid_argument("bad peer address: " + phost);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&paddr), sizeof(paddr)) != 0) {
    ::close(fd_);
    throw std::runtime_error("connect() failed for " + peer);
  }
  const int flags = ::fcntl(fd_, F_GETFL, 0);
  ::fcntl(fd_, F_SETFL, flags | O_NONBLOCK);
}

UdpEndpoint::~UdpEndpoint() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpEndpoint::send(const std::vector<std::uint8_t>& bytes) {
  if (::send(fd_, bytes.data(), bytes.size(), 0) < 0)
    throw std::runtime_error("udp send failed");
}

std::optional<std::vector<std::uint8_t>> UdpEndpoint::try_receive() {
  std::vector<std::uint8_t> buffer(65536);
  const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
  if (n < 0) return std::nullopt;
  buffer.resize(static_cast<std::size_t>(n));
  return buffer;
}

void append_record(std::vector<std::uint8_t>& log,
                   const std::vector<std::uint8_t>& record) {
  put_u32(log, static_cast<std::uint32_t>(record.size()));
  log.insert(log.end(), record.begin(), record.end());
}

std::vector<std::vector<std::uint8_t>> split_records(
    const std::vector<std::uint8_t>& log) {
  std::vector<std::vector<std::uint8_t>> out;
  std::size_t pos = 0;
  while (pos < log.size()) {
    if (pos + 4 > log.size()) throw Truncated("record log truncated");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= std::uint32_t(log[pos + i]) << (8 * i);
    pos += 4;
    if (pos + len > log.size()) throw Truncated("record log truncated");
    out.emplace_back(log.begin() + pos, log.begin() + pos + len);
    pos += len;
  }
  return out;
}

}  // namespace tbt
