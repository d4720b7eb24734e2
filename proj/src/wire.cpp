#include "cogroute/wire.hpp"

#include <string>

namespace cogroute::cognition {

WireBytes encode(const CognitivePacket& packet) {
  return {
      packet.version,
      static_cast<std::uint8_t>(packet.sender_id >> 8),
      static_cast<std::uint8_t>(packet.sender_id),
      static_cast<std::uint8_t>(packet.epoch >> 24),
      static_cast<std::uint8_t>(packet.epoch >> 16),
      static_cast<std::uint8_t>(packet.epoch >> 8),
      static_cast<std::uint8_t>(packet.epoch),
      packet.fcpi.value(),
  };
}

CognitivePacket decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kWireSize) {
    throw DecodeError("cognitive packet must be 8 bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes[0] != kWireVersion) {
    throw DecodeError("unsupported cognitive packet version " + std::to_string(bytes[0]));
  }
  CognitivePacket packet;
  packet.version = bytes[0];
  packet.sender_id = static_cast<RouterId>((bytes[1] << 8) | bytes[2]);
  packet.epoch = (std::uint32_t{bytes[3]} << 24) | (std::uint32_t{bytes[4]} << 16) |
                 (std::uint32_t{bytes[5]} << 8) | std::uint32_t{bytes[6]};
  packet.fcpi = fcpi::Fcpi(bytes[7]);
  return packet;
}

}  // namespace cogroute::cognition
