#pragma once

// Datagram links and periodic endpoints. A Link moves whole datagrams or
// nothing; the in-process channel and the UDP socket are interchangeable.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "vhap/protocol.hpp"

namespace vhap::proto {

class Link {
 public:
  virtual ~Link() = default;
  // False when the datagram was not accepted (dropped or socket error).
  virtual bool send(std::span<const std::uint8_t> datagram) = 0;
  // Oldest pending datagram, waiting up to `timeout`.
  virtual std::optional<Datagram> receive(std::chrono::milliseconds timeout) = 0;
  // Drains everything pending and returns the newest datagram.
  std::optional<Datagram> receive_latest(std::chrono::milliseconds timeout = std::chrono::milliseconds(0));
};

// Bounded deliver-latest queue: when full, the oldest datagram is dropped.
class InProcessChannel final : public Link {
 public:
  explicit InProcessChannel(std::size_t capacity);

  bool send(std::span<const std::uint8_t> datagram) override;
  std::optional<Datagram> receive(std::chrono::milliseconds timeout) override;

  std::size_t capacity() const { return capacity_; }
  std::size_t depth() const;
  std::uint64_t overwritten() const { return overwritten_.load(); }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Datagram> queue_;
  std::atomic<std::uint64_t> overwritten_{0};
};

std::unique_ptr<InProcessChannel> shared_channel(std::size_t capacity);

struct UdpAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::string to_string() const;
};

// "host:port", IPv4 dotted quad or "localhost".
UdpAddress parse_address(const std::string& text);

// Non-blocking IPv4 UDP socket bound to `bind`; sends go to the peer.
// Socket errors at construction throw std::system_error.
class UdpLink final : public Link {
 public:
  explicit UdpLink(const UdpAddress& bind);
  UdpLink(const UdpAddress& bind, const UdpAddress& peer);
  ~UdpLink() override;
  UdpLink(const UdpLink&) = delete;
  UdpLink& operator=(const UdpLink&) = delete;

  void set_peer(const UdpAddress& peer);
  UdpAddress local_address() const;

  bool send(std::span<const std::uint8_t> datagram) override;
  std::optional<Datagram> receive(std::chrono::milliseconds timeout) override;

 private:
  int fd_ = -1;
  bool has_peer_ = false;
  UdpAddress peer_;
  std::array<std::uint8_t, 16> peer_sockaddr_{};
};

// Decorator dropping the sends for which `drop(index)` is true; index
// counts send attempts from 0.
class LossyLink final : public Link {
 public:
  LossyLink(Link& inner, std::function<bool(std::uint64_t)> drop);

  bool send(std::span<const std::uint8_t> datagram) override;
  std::optional<Datagram> receive(std::chrono::milliseconds timeout) override { return inner_.receive(timeout); }

  std::uint64_t injected_drops() const { return injected_; }

 private:
  Link& inner_;
  std::function<bool(std::uint64_t)> drop_;
  std::uint64_t attempts_ = 0;
  std::uint64_t injected_ = 0;
};

// Counters shared with other threads while an endpoint runs.
struct LinkCounters {
  std::atomic<std::uint64_t> packets_sent{0};
  std::atomic<std::uint64_t> packets_received{0};
  std::atomic<std::uint64_t> bytes_sent{0};
  std::atomic<std::uint64_t> bytes_received{0};
  std::atomic<std::uint64_t> drops_detected{0};
  std::atomic<std::uint64_t> decode_errors{0};
  std::atomic<std::int64_t> first_ns{-1};
  std::atomic<std::int64_t> last_ns{-1};
};

struct LinkStats {
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_received = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t drops_detected = 0;
  std::uint64_t decode_errors = 0;
  double measured_rate = 0.0;  // Hz, packets over first-to-last interval
  double measured_load = 0.0;  // bits/s at measured_rate with the mean datagram size
};

LinkStats snapshot(const LinkCounters& c);

// Bits per second of a stream of fixed-size datagrams.
constexpr double stream_load(double rate_hz, std::size_t datagram_bytes) {
  return rate_hz * static_cast<double>(datagram_bytes) * 8.0;
}

enum class Role { Publisher, Subscriber };

struct EndpointConfig {
  Role role = Role::Publisher;
  double rate_hz = 1000.0;
  // Zero runs until `stop` is set.
  std::chrono::duration<double> duration{0.0};
};

using PacketSource = std::function<Packet(std::uint32_t seq, double t)>;
using PacketSink = std::function<void(const Decoded&)>;

// Publisher: sends source(seq, t) on an absolute schedule of rate_hz, seq
// starting at 1. Subscriber: decodes everything received, counts seq gaps
// as drops, ignores stale or repeated seq, and forwards the rest to sink.
LinkStats run_endpoint(const EndpointConfig& cfg, Link& link, const PacketSource& source, const PacketSink& sink,
                       LinkCounters& counters, const std::atomic<bool>& stop);

// Tracks sequence gaps of one stream.
class SeqTracker {
 public:
  // False for stale or duplicate sequence numbers.
  bool accept(std::uint32_t seq);
  std::uint64_t drops() const { return drops_; }

 private:
  bool started_ = false;
  std::uint32_t last_ = 0;
  std::uint64_t drops_ = 0;
};

}  // namespace vhap::proto
