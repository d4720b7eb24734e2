#pragma once

// Forward Channel Performance Index: one byte summarizing the health of a
// router's eight outgoing channels. Bit (m-1) is channel Cm; C8 is the MSB.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace cogroute::fcpi {

inline constexpr int kChannels = 8;

class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// One QoS sample of a channel: P1 bandwidth, P2 delay, P3 jitter, P4 loss.
struct ChannelMetrics {
  double available_bandwidth_fraction = 1.0;
  double delay_ms = 0.0;
  double jitter_ms = 0.0;
  double loss_fraction = 0.0;

  /// Stand-in for a channel slot the router does not have; always evaluates to 0.
  static constexpr ChannelMetrics absent() { return {0.0, 0.0, 0.0, 1.0}; }
};

struct QosThresholds {
  double min_bandwidth_fraction = 0.70;
  double max_delay_ms = 100.0;
  double max_jitter_ms = 30.0;
  double max_loss_fraction = 0.10;
};

/// Throws InputError unless every field is finite and fractions lie in [0,1].
void validate(const ChannelMetrics& metrics);
void validate(const QosThresholds& thresholds);

class Fcpi {
public:
  constexpr Fcpi() = default;
  constexpr explicit Fcpi(std::uint8_t value) : value_(value) {}

  static constexpr Fcpi all_up() { return Fcpi(0xFF); }

  constexpr std::uint8_t value() const { return value_; }

  constexpr bool operator==(const Fcpi&) const = default;

private:
  std::uint8_t value_ = 0;
};

using ChannelBits = std::array<int, kChannels>;

/// 1 iff bandwidth, delay, jitter and loss all meet their thresholds (inclusive).
int evaluate_channel(const ChannelMetrics& metrics, const QosThresholds& thresholds);

/// per_channel[i] describes channel C(i+1). Throws InputError unless exactly 8 entries.
Fcpi synthesize_fcpi(std::span<const ChannelMetrics> per_channel, const QosThresholds& thresholds);

/// Packs bits (index i = channel C(i+1), each 0 or 1).
Fcpi pack(const ChannelBits& bits);

/// Index i of the result is channel C(i+1).
ChannelBits unpack(Fcpi fcpi);

/// Whether channel Cm is up, m in [1,8]. Throws InputError otherwise.
bool channel_up(Fcpi fcpi, int m);

}  // namespace cogroute::fcpi
