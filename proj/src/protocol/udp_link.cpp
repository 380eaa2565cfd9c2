#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <stdexcept>
#include <system_error>

#include "vhap/transport.hpp"

namespace vhap::proto {

namespace {

sockaddr_in to_sockaddr(const UdpAddress& a) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(a.port);
  const std::string host = a.host == "localhost" ? "127.0.0.1" : a.host;
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) throw std::invalid_argument("bad IPv4 address: " + a.host);
  return sa;
}

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

}  // namespace

std::string UdpAddress::to_string() const { return host + ":" + std::to_string(port); }

UdpAddress parse_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) throw std::invalid_argument("address must be host:port: " + text);
  UdpAddress a;
  a.host = text.substr(0, colon);
  unsigned port = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port > 65535) throw std::invalid_argument("bad port in address: " + text);
  a.port = static_cast<std::uint16_t>(port);
  to_sockaddr(a);
  return a;
}

UdpLink::UdpLink(const UdpAddress& bind) {
  const sockaddr_in sa = to_sockaddr(bind);
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw_errno("socket");
  const int flags = ::fcntl(fd_, F_GETFL, 0);
  if (flags < 0 || ::fcntl(fd_, F_SETFL, flags | O_NONBLOCK) < 0) {
    ::close(fd_);
    throw_errno("fcntl");
  }
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa)) < 0) {
    const int err = errno;
    ::close(fd_);
    throw std::system_error(err, std::generic_category(), "bind " + bind.to_string());
  }
}

UdpLink::UdpLink(const UdpAddress& bind, const UdpAddress& peer) : UdpLink(bind) { set_peer(peer); }

UdpLink::~UdpLink() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpLink::set_peer(const UdpAddress& peer) {
  const sockaddr_in sa = to_sockaddr(peer);
  static_assert(sizeof(sa) <= sizeof(peer_sockaddr_));
  std::memcpy(peer_sockaddr_.data(), &sa, sizeof(sa));
  peer_ = peer;
  has_peer_ = true;
}

UdpAddress UdpLink::local_address() const {
  sockaddr_in sa{};
  socklen_t len = sizeof(sa);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len) < 0) throw_errno("getsockname");
  char buf[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &sa.sin_addr, buf, sizeof(buf));
  return {buf, ntohs(sa.sin_port)};
}

bool UdpLink::send(std::span<const std::uint8_t> datagram) {
  if (!has_peer_) return false;
  const ssize_t n = ::sendto(fd_, datagram.data(), datagram.size(), 0,
                             reinterpret_cast<const sockaddr*>(peer_sockaddr_.data()), sizeof(sockaddr_in));
  return n == static_cast<ssize_t>(datagram.size());
}

std::optional<Datagram> UdpLink::receive(std::chrono::milliseconds timeout) {
  std::array<std::uint8_t, 65536> buf;
  for (;;) {
    const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n >= 0) return Datagram(buf.begin(), buf.begin() + n);
    if (errno == EINTR) continue;
    if (errno != EAGAIN && errno != EWOULDBLOCK) return std::nullopt;
    if (timeout.count() <= 0) return std::nullopt;
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (r <= 0) return std::nullopt;
    timeout = std::chrono::milliseconds(0);
  }
}

}  // namespace vhap::proto
