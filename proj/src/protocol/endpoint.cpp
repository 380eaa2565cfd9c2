#include <stdexcept>
#include <thread>

#include "vhap/transport.hpp"

namespace vhap::proto {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

void mark(LinkCounters& c, std::int64_t ns) {
  std::int64_t unset = -1;
  c.first_ns.compare_exchange_strong(unset, ns);
  c.last_ns.store(ns);
}

}  // namespace

bool SeqTracker::accept(std::uint32_t seq) {
  if (!started_) {
    started_ = true;
    last_ = seq;
    return true;
  }
  if (seq <= last_) return false;
  drops_ += seq - last_ - 1;
  last_ = seq;
  return true;
}

LinkStats snapshot(const LinkCounters& c) {
  LinkStats s;
  s.packets_sent = c.packets_sent.load();
  s.packets_received = c.packets_received.load();
  s.bytes_sent = c.bytes_sent.load();
  s.bytes_received = c.bytes_received.load();
  s.drops_detected = c.drops_detected.load();
  s.decode_errors = c.decode_errors.load();
  const std::uint64_t n = s.packets_sent > 0 ? s.packets_sent : s.packets_received;
  const std::uint64_t bytes = s.packets_sent > 0 ? s.bytes_sent : s.bytes_received;
  const std::int64_t span = c.last_ns.load() - c.first_ns.load();
  if (n >= 2 && span > 0) {
    s.measured_rate = static_cast<double>(n - 1) / (static_cast<double>(span) * 1e-9);
    s.measured_load = s.measured_rate * (static_cast<double>(bytes) / static_cast<double>(n)) * 8.0;
  }
  return s;
}

LinkStats run_endpoint(const EndpointConfig& cfg, Link& link, const PacketSource& source, const PacketSink& sink,
                       LinkCounters& counters, const std::atomic<bool>& stop) {
  if (!(cfg.rate_hz > 0.0)) throw std::invalid_argument("endpoint rate must be > 0");
  const auto t0 = Clock::now();
  const double limit_s = cfg.duration.count();
  auto expired = [&] {
    return limit_s > 0.0 && std::chrono::duration<double>(Clock::now() - t0).count() >= limit_s;
  };

  if (cfg.role == Role::Publisher) {
    if (!source) throw std::invalid_argument("publisher needs a packet source");
    const auto period = std::chrono::duration<double>(1.0 / cfg.rate_hz);
    for (std::uint64_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * period.count();
      if (stop.load() || (limit_s > 0.0 && t >= limit_s)) break;
      std::this_thread::sleep_until(t0 + std::chrono::duration_cast<Clock::duration>(k * period));
      const auto seq = static_cast<std::uint32_t>(k + 1);
      const auto ns = since(t0);
      const Datagram d = encode(source(seq, t), seq, static_cast<std::uint64_t>(ns / 1000));
      if (link.send(d)) {
        counters.packets_sent.fetch_add(1);
        counters.bytes_sent.fetch_add(d.size());
        mark(counters, ns);
      }
    }
  } else {
    SeqTracker tracker;
    while (!stop.load() && !expired()) {
      auto d = link.receive(std::chrono::milliseconds(10));
      if (!d) continue;
      const auto decoded = decode(*d);
      if (const auto* err = std::get_if<DecodeError>(&decoded)) {
        (void)err;
        counters.decode_errors.fetch_add(1);
        continue;
      }
      const auto& pkt = std::get<Decoded>(decoded);
      counters.packets_received.fetch_add(1);
      counters.bytes_received.fetch_add(d->size());
      mark(counters, since(t0));
      if (!tracker.accept(pkt.header.seq)) continue;
      counters.drops_detected.store(tracker.drops());
      if (sink) sink(pkt);
    }
  }
  return snapshot(counters);
}

}  // namespace vhap::proto
