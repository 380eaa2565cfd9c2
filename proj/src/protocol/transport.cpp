#include <stdexcept>

#include "vhap/transport.hpp"

namespace vhap::proto {

std::optional<Datagram> Link::receive_latest(std::chrono::milliseconds timeout) {
  auto latest = receive(timeout);
  if (!latest) return std::nullopt;
  while (auto next = receive(std::chrono::milliseconds(0))) latest = std::move(next);
  return latest;
}

InProcessChannel::InProcessChannel(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("channel capacity must be >= 1");
}

bool InProcessChannel::send(std::span<const std::uint8_t> datagram) {
  {
    std::lock_guard lock(mu_);
    if (queue_.size() == capacity_) {
      queue_.pop_front();
      overwritten_.fetch_add(1);
    }
    queue_.emplace_back(datagram.begin(), datagram.end());
  }
  cv_.notify_one();
  return true;
}

std::optional<Datagram> InProcessChannel::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (queue_.empty() && timeout.count() > 0) cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); });
  if (queue_.empty()) return std::nullopt;
  Datagram d = std::move(queue_.front());
  queue_.pop_front();
  return d;
}

std::size_t InProcessChannel::depth() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::unique_ptr<InProcessChannel> shared_channel(std::size_t capacity) {
  return std::make_unique<InProcessChannel>(capacity);
}

LossyLink::LossyLink(Link& inner, std::function<bool(std::uint64_t)> drop) : inner_(inner), drop_(std::move(drop)) {}

bool LossyLink::send(std::span<const std::uint8_t> datagram) {
  const auto index = attempts_++;
  if (drop_ && drop_(index)) {
    ++injected_;
    return false;
  }
  return inner_.send(datagram);
}

}  // namespace vhap::proto
