#pragma once

// Binary datagram format. Header (18 bytes): magic "VHAP", version u8,
// kind u8, seq u32 LE, timestamp_us u64 LE. All floating-point payload
// values are IEEE-754 binary64, little-endian.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vhap/geometry.hpp"
#include "vhap/vps.hpp"

namespace vhap::proto {

inline constexpr std::array<std::uint8_t, 4> kMagic{'V', 'H', 'A', 'P'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 18;
inline constexpr std::size_t kMaxDatagram = 1400;
inline constexpr double kQuaternionTolerance = 1e-6;

enum class PacketKind : std::uint8_t { Pose = 1, Wrench = 2, Config = 3, Status = 4 };

struct PosePacket {
  std::array<double, 3> position{0.0, 0.0, 0.0};
  std::array<double, 4> orientation{1.0, 0.0, 0.0, 0.0};  // w, x, y, z
  bool operator==(const PosePacket&) const = default;
};

struct WrenchPacket {
  std::array<double, 3> force{0.0, 0.0, 0.0};
  std::array<double, 3> torque{0.0, 0.0, 0.0};
  bool operator==(const WrenchPacket&) const = default;
};

struct ConfigPacket {
  std::vector<std::pair<std::string, double>> entries;
  bool operator==(const ConfigPacket&) const = default;
};

enum class RunState : std::uint8_t { Idle = 0, Running = 1, Converged = 2, NotConverged = 3, Fault = 4 };

struct StatusPacket {
  std::uint8_t state = 0;
  double rate_hz = 0.0;
  bool operator==(const StatusPacket&) const = default;
};

using Packet = std::variant<PosePacket, WrenchPacket, ConfigPacket, StatusPacket>;

PacketKind kind_of(const Packet& p);

struct Header {
  std::uint8_t version = kVersion;
  PacketKind kind = PacketKind::Pose;
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;
};

struct Decoded {
  Header header;
  Packet packet;
};

enum class DecodeError { BadMagic, BadVersion, UnknownKind, Truncated, TrailingBytes, InvalidPayload };
const char* to_string(DecodeError e);

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Datagram = std::vector<std::uint8_t>;

// Size of the encoded datagram, header included.
std::size_t datagram_size(const Packet& p);

// Throws EncodeError on oversize datagrams, non-finite values or a
// non-unit quaternion.
Datagram encode(const Packet& p, std::uint32_t seq, std::uint64_t timestamp_us);

// Never reads outside `bytes`.
std::variant<Decoded, DecodeError> decode(std::span<const std::uint8_t> bytes);

PosePacket to_packet(const RigidPose& pose);
RigidPose to_pose(const PosePacket& p);
WrenchPacket to_packet(const Wrench& w);
Wrench to_wrench(const WrenchPacket& p, const Vec3& reference = Vec3::Zero());

}  // namespace vhap::proto
