#include "cogroute/fcpi.hpp"

#include <cmath>
#include <string>

namespace cogroute::fcpi {

namespace {

bool is_fraction(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }
bool is_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void validate(const ChannelMetrics& metrics) {
  if (!is_fraction(metrics.available_bandwidth_fraction)) {
    throw InputError("available_bandwidth_fraction must lie in [0,1]");
  }
  if (!is_nonnegative(metrics.delay_ms)) throw InputError("delay_ms must be finite and >= 0");
  if (!is_nonnegative(metrics.jitter_ms)) throw InputError("jitter_ms must be finite and >= 0");
  if (!is_fraction(metrics.loss_fraction)) throw InputError("loss_fraction must lie in [0,1]");
}

void validate(const QosThresholds& thresholds) {
  const double bw = thresholds.min_bandwidth_fraction;
  if (!(std::isfinite(bw) && bw > 0.0 && bw <= 1.0)) {
    throw InputError("min_bandwidth_fraction must lie in (0,1]");
  }
  for (double bound : {thresholds.max_delay_ms, thresholds.max_jitter_ms, thresholds.max_loss_fraction}) {
    if (!(std::isfinite(bound) && bound > 0.0)) throw InputError("QoS bounds must be positive");
  }
}

int evaluate_channel(const ChannelMetrics& metrics, const QosThresholds& thresholds) {
  validate(metrics);
  validate(thresholds);
  const bool ok = metrics.available_bandwidth_fraction >= thresholds.min_bandwidth_fraction &&
                  metrics.delay_ms <= thresholds.max_delay_ms &&
                  metrics.jitter_ms <= thresholds.max_jitter_ms &&
                  metrics.loss_fraction <= thresholds.max_loss_fraction;
  return ok ? 1 : 0;
}

Fcpi synthesize_fcpi(std::span<const ChannelMetrics> per_channel, const QosThresholds& thresholds) {
  if (per_channel.size() != kChannels) {
    throw InputError("synthesize_fcpi expects 8 channels, got " + std::to_string(per_channel.size()));
  }
  ChannelBits bits{};
  for (int m = 0; m < kChannels; ++m) bits[m] = evaluate_channel(per_channel[m], thresholds);
  return pack(bits);
}

Fcpi pack(const ChannelBits& bits) {
  unsigned value = 0;
  for (int m = 0; m < kChannels; ++m) {
    if (bits[m] != 0 && bits[m] != 1) throw InputError("channel bits must be 0 or 1");
    value |= static_cast<unsigned>(bits[m]) << m;
  }
  return Fcpi(static_cast<std::uint8_t>(value));
}

ChannelBits unpack(Fcpi fcpi) {
  ChannelBits bits{};
  for (int m = 0; m < kChannels; ++m) bits[m] = (fcpi.value() >> m) & 1;
  return bits;
}

bool channel_up(Fcpi fcpi, int m) {
  if (m < 1 || m > kChannels) throw InputError("channel index " + std::to_string(m) + " outside [1,8]");
  return ((fcpi.value() >> (m - 1)) & 1) != 0;
}

}  // namespace cogroute::fcpi
