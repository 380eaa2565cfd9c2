#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "vhap/protocol.hpp"

namespace vhap::proto {

namespace {

class Writer {
 public:
  explicit Writer(Datagram& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { uint_le(v, 2); }
  void u32(std::uint32_t v) { uint_le(v, 4); }
  void u64(std::uint64_t v) { uint_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }

 private:
  void uint_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Datagram& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::size_t remaining() const { return in_.size() - pos_; }
  bool u8(std::uint8_t& v) {
    std::uint64_t x;
    if (!uint_le(x, 1)) return false;
    v = static_cast<std::uint8_t>(x);
    return true;
  }
  bool u16(std::uint16_t& v) {
    std::uint64_t x;
    if (!uint_le(x, 2)) return false;
    v = static_cast<std::uint16_t>(x);
    return true;
  }
  bool u32(std::uint32_t& v) {
    std::uint64_t x;
    if (!uint_le(x, 4)) return false;
    v = static_cast<std::uint32_t>(x);
    return true;
  }
  bool u64(std::uint64_t& v) { return uint_le(v, 8); }
  bool f64(double& v) {
    std::uint64_t x;
    if (!uint_le(x, 8)) return false;
    v = std::bit_cast<double>(x);
    return true;
  }
  bool bytes(std::string& s, std::size_t n) {
    if (remaining() < n) return false;
    s.assign(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return true;
  }

 private:
  bool uint_le(std::uint64_t& v, int n) {
    if (remaining() < static_cast<std::size_t>(n)) return false;
    v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return true;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool unit_quaternion(const std::array<double, 4>& q) {
  const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  return std::abs(n - 1.0) <= kQuaternionTolerance;
}

void check_encodable(const Packet& p) {
  if (const auto* pose = std::get_if<PosePacket>(&p)) {
    if (!all_finite(pose->position) || !all_finite(pose->orientation)) throw EncodeError("pose has non-finite values");
    if (!unit_quaternion(pose->orientation)) throw EncodeError("pose quaternion is not unit length");
  } else if (const auto* w = std::get_if<WrenchPacket>(&p)) {
    if (!all_finite(w->force) || !all_finite(w->torque)) throw EncodeError("wrench has non-finite values");
  } else if (const auto* c = std::get_if<ConfigPacket>(&p)) {
    if (c->entries.size() > 0xFFFF) throw EncodeError("too many config entries");
    for (const auto& [key, value] : c->entries) {
      if (key.size() > 0xFFFF) throw EncodeError("config key too long");
      if (!std::isfinite(value)) throw EncodeError("config value is not finite");
    }
  } else if (const auto* s = std::get_if<StatusPacket>(&p)) {
    if (!std::isfinite(s->rate_hz)) throw EncodeError("status rate is not finite");
  }
}

}  // namespace

PacketKind kind_of(const Packet& p) {
  return static_cast<PacketKind>(p.index() + 1);
}

const char* to_string(DecodeError e) {
  switch (e) {
    case DecodeError::BadMagic: return "bad magic";
    case DecodeError::BadVersion: return "unsupported version";
    case DecodeError::UnknownKind: return "unknown packet kind";
    case DecodeError::Truncated: return "truncated datagram";
    case DecodeError::TrailingBytes: return "trailing bytes after payload";
    case DecodeError::InvalidPayload: return "invalid payload";
  }
  return "?";
}

std::size_t datagram_size(const Packet& p) {
  switch (kind_of(p)) {
    case PacketKind::Pose: return kHeaderSize + 56;
    case PacketKind::Wrench: return kHeaderSize + 48;
    case PacketKind::Status: return kHeaderSize + 9;
    case PacketKind::Config: {
      std::size_t n = kHeaderSize + 2;
      for (const auto& [key, value] : std::get<ConfigPacket>(p).entries) n += 2 + key.size() + 8;
      return n;
    }
  }
  return 0;
}

Datagram encode(const Packet& p, std::uint32_t seq, std::uint64_t timestamp_us) {
  const std::size_t size = datagram_size(p);
  if (size > kMaxDatagram) {
    throw EncodeError("datagram of " + std::to_string(size) + " bytes exceeds " + std::to_string(kMaxDatagram));
  }
  check_encodable(p);

  Datagram out;
  out.reserve(size);
  Writer w(out);
  for (auto b : kMagic) w.u8(b);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(kind_of(p)));
  w.u32(seq);
  w.u64(timestamp_us);

  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PosePacket>) {
          for (double x : v.position) w.f64(x);
          for (double x : v.orientation) w.f64(x);
        } else if constexpr (std::is_same_v<T, WrenchPacket>) {
          for (double x : v.force) w.f64(x);
          for (double x : v.torque) w.f64(x);
        } else if constexpr (std::is_same_v<T, ConfigPacket>) {
          w.u16(static_cast<std::uint16_t>(v.entries.size()));
          for (const auto& [key, value] : v.entries) {
            w.u16(static_cast<std::uint16_t>(key.size()));
            w.bytes(key);
            w.f64(value);
          }
        } else {
          w.u8(v.state);
          w.f64(v.rate_hz);
        }
      },
      p);
  return out;
}

std::variant<Decoded, DecodeError> decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size()) return DecodeError::Truncated;
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) return DecodeError::BadMagic;
  if (bytes.size() < kHeaderSize) return DecodeError::Truncated;

  Reader r(bytes.subspan(kMagic.size()));
  Decoded d;
  std::uint8_t kind = 0;
  r.u8(d.header.version);
  r.u8(kind);
  r.u32(d.header.seq);
  r.u64(d.header.timestamp_us);
  if (d.header.version != kVersion) return DecodeError::BadVersion;
  if (kind < 1 || kind > 4) return DecodeError::UnknownKind;
  d.header.kind = static_cast<PacketKind>(kind);

  switch (d.header.kind) {
    case PacketKind::Pose: {
      PosePacket p;
      for (auto& x : p.position)
        if (!r.f64(x)) return DecodeError::Truncated;
      for (auto& x : p.orientation)
        if (!r.f64(x)) return DecodeError::Truncated;
      if (!all_finite(p.position) || !all_finite(p.orientation) || !unit_quaternion(p.orientation))
        return DecodeError::InvalidPayload;
      d.packet = p;
      break;
    }
    case PacketKind::Wrench: {
      WrenchPacket p;
      for (auto& x : p.force)
        if (!r.f64(x)) return DecodeError::Truncated;
      for (auto& x : p.torque)
        if (!r.f64(x)) return DecodeError::Truncated;
      if (!all_finite(p.force) || !all_finite(p.torque)) return DecodeError::InvalidPayload;
      d.packet = p;
      break;
    }
    case PacketKind::Config: {
      ConfigPacket p;
      std::uint16_t count = 0;
      if (!r.u16(count)) return DecodeError::Truncated;
      for (std::uint16_t i = 0; i < count; ++i) {
        std::uint16_t len = 0;
        std::string key;
        double value = 0.0;
        if (!r.u16(len) || !r.bytes(key, len) || !r.f64(value)) return DecodeError::Truncated;
        if (!std::isfinite(value)) return DecodeError::InvalidPayload;
        p.entries.emplace_back(std::move(key), value);
      }
      d.packet = std::move(p);
      break;
    }
    case PacketKind::Status: {
      StatusPacket p;
      if (!r.u8(p.state) || !r.f64(p.rate_hz)) return DecodeError::Truncated;
      if (!std::isfinite(p.rate_hz)) return DecodeError::InvalidPayload;
      d.packet = p;
      break;
    }
  }
  if (r.remaining() != 0) return DecodeError::TrailingBytes;
  return d;
}

PosePacket to_packet(const RigidPose& pose) {
  const Quat q = pose.quaternion();
  PosePacket p;
  p.position = {pose.position().x(), pose.position().y(), pose.position().z()};
  p.orientation = {q.w(), q.x(), q.y(), q.z()};
  return p;
}

RigidPose to_pose(const PosePacket& p) {
  const Quat q(p.orientation[0], p.orientation[1], p.orientation[2], p.orientation[3]);
  return RigidPose::from_quaternion(q.normalized(), Vec3(p.position[0], p.position[1], p.position[2]));
}

WrenchPacket to_packet(const Wrench& w) {
  WrenchPacket p;
  p.force = {w.force.x(), w.force.y(), w.force.z()};
  p.torque = {w.torque.x(), w.torque.y(), w.torque.z()};
  return p;
}

Wrench to_wrench(const WrenchPacket& p, const Vec3& reference) {
  Wrench w;
  w.force = Vec3(p.force[0], p.force[1], p.force[2]);
  w.torque = Vec3(p.torque[0], p.torque[1], p.torque[2]);
  w.reference_point = reference;
  return w;
}

}  // namespace vhap::proto
