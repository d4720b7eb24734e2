#pragma once

// Cognitive Packet wire format, big-endian, 8 bytes:
//
//   byte 0     version (0x01)
//   bytes 1-2  sender id, unsigned 16-bit
//   bytes 3-6  epoch, unsigned 32-bit
//   byte 7     FCPI of the sender's own outgoing channels

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "cogroute/fcpi.hpp"

namespace cogroute::cognition {

using RouterId = std::uint16_t;

inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kWireSize = 8;

class DecodeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CognitivePacket {
  std::uint8_t version = kWireVersion;
  RouterId sender_id = 0;
  /// Index p of the dissemination round t_p; strictly increasing per sender.
  std::uint32_t epoch = 0;
  fcpi::Fcpi fcpi;

  bool operator==(const CognitivePacket&) const = default;
};

using WireBytes = std::array<std::uint8_t, kWireSize>;

WireBytes encode(const CognitivePacket& packet);

/// Rejects any length other than 8 and any version other than 1.
CognitivePacket decode(std::span<const std::uint8_t> bytes);

}  // namespace cogroute::cognition
