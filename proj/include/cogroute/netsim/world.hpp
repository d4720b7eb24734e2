#pragma once

// Deterministic epoch-driven simulator. Each epoch runs, in order:
//   1. advance every channel's hidden quality chain and sample its metrics
//   2. synthesize each router's FCPI; on dissemination rounds send Cognitive
//      Packets to every router that has a channel into the sender
//   3. ingest packets, retrain on cadence
//   4. inject traffic
//   5. forward queued packets (blind or cognitive next-hop order)
//   6. per-transmission delivery with probability 1 - loss of the true state
//   7. accumulate metrics
//
// Randomness comes from named streams derived from the run seed. Channel
// dynamics and traffic streams do not depend on the mode, so blind and
// cognitive runs with one seed face the same ground truth and demand.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "cogroute/cognition.hpp"
#include "cogroute/netsim/routing.hpp"
#include "cogroute/netsim/scenario.hpp"
#include "cogroute/rng.hpp"

namespace cogroute::netsim {

enum class Mode { Blind, Cognitive };
enum class RunMode { Blind, Cognitive, Compare };

std::string_view to_string(Mode mode);
std::optional<RunMode> parse_run_mode(std::string_view text);

struct EpochSample {
  std::uint32_t epoch = 0;
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t cognitive_bytes = 0;
  std::uint64_t data_bytes = 0;
};

struct RunReport {
  Mode mode = Mode::Blind;
  std::uint64_t seed = 0;
  std::uint32_t epochs = 0;

  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t total_retransmissions = 0;
  std::uint64_t cognitive_bytes = 0;
  std::uint64_t data_bytes = 0;
  double total_delay_ms = 0.0;
  /// Next-round FCPI bits predicted / predicted correctly, over channels that
  /// exist. Blind routers implicitly assume every channel is up.
  std::uint64_t prediction_bits = 0;
  std::uint64_t prediction_hits = 0;

  std::vector<EpochSample> series;

  double delivery_ratio() const;
  double mean_delay_ms() const;
  double prediction_bit_accuracy() const;
};

/// One forwarding decision, for packet-by-packet comparisons between modes.
struct Decision {
  std::uint32_t epoch = 0;
  std::uint64_t packet_id = 0;
  RouterId router = 0;
  std::vector<Attempt> attempts;
  bool dropped = false;

  bool operator==(const Decision& other) const;
};

struct WorldOptions {
  bool record_decisions = false;
  bool record_ground_truth = false;
};

class World {
public:
  World(Scenario scenario, Mode mode, std::uint64_t seed, WorldOptions options = {});

  void step_epoch();

  std::uint32_t epoch() const { return epoch_; }
  Mode mode() const { return mode_; }
  const Scenario& scenario() const { return scenario_; }

  /// Counters so far; packets still queued count as in flight.
  RunReport report() const;

  const std::vector<Decision>& decisions() const { return decisions_; }
  /// Per epoch, the hidden quality state of every channel in scenario order.
  const std::vector<std::vector<std::uint8_t>>& ground_truth() const { return ground_truth_; }

  /// FCPI the router synthesized from its own channels this epoch.
  fcpi::Fcpi measured_fcpi(RouterId router) const;
  /// Routers this router has a channel to, ascending.
  const std::vector<RouterId>& forward_neighbors(RouterId router) const;
  /// Null in blind mode.
  const cognition::CognitiveDomain* cognitive_domain(RouterId router) const;

  /// Queues a packet at `source` for forwarding in the next step.
  void inject(RouterId source, RouterId destination);

private:
  struct ChannelState {
    RandomStream rng;
    int quality = 0;
    fcpi::ChannelMetrics metrics;
    int used = 0;
  };

  struct RouterState {
    RouterId id = 0;
    std::array<int, fcpi::kChannels> slot{};  // channel index per Cm, -1 when absent
    std::vector<RouterId> forward_neighbors;
    std::vector<std::size_t> in_neighbors;  // router indices with a channel into this one
    std::map<RouterId, double> hop_costs;
    std::deque<DataPacket> queue;
    std::vector<DataPacket> arriving;
    std::optional<cognition::CognitiveDomain> cognition;
    fcpi::Fcpi measured;
  };

  std::size_t router_index(RouterId id) const;
  void advance_channels();
  void disseminate(EpochSample& sample);
  void forward_packets(EpochSample& sample);
  bool transmit(std::size_t channel, DataPacket& packet, std::uint32_t try_index, EpochSample& sample);

  Scenario scenario_;
  Mode mode_;
  std::uint64_t seed_;
  WorldOptions options_;
  std::uint32_t epoch_ = 0;

  std::vector<ChannelState> channels_;
  std::vector<RouterState> routers_;
  std::map<RouterId, std::size_t> index_of_;
  std::map<std::pair<RouterId, RouterId>, std::size_t> link_of_;
  RandomStream traffic_rng_;
  std::uint64_t delivery_key_;
  std::uint64_t next_packet_id_ = 0;

  RunReport totals_;
  std::vector<Decision> decisions_;
  std::vector<std::vector<std::uint8_t>> ground_truth_;
};

/// One run in one mode.
RunReport run_mode(const Scenario& scenario, std::uint32_t epochs, std::uint64_t seed, Mode mode);

/// Blind and/or cognitive runs; compare yields [blind, cognitive] on the same seed.
std::vector<RunReport> run(const Scenario& scenario, std::uint32_t epochs, std::uint64_t seed, RunMode mode);

/// Predicted FCPI of each forward router, per epoch, as seen by `router` in
/// cognitive mode.
struct PredictionTrace {
  RouterId router = 0;
  std::vector<RouterId> neighbors;
  /// values[i][t]: prediction for neighbors[i] after epoch t.
  std::vector<std::vector<std::uint8_t>> values;
};

/// Throws std::invalid_argument for an unknown router or a neighbor the
/// router has no channel to.
PredictionTrace trace_predictions(const Scenario& scenario,
                                  RouterId router,
                                  std::optional<RouterId> neighbor,
                                  std::uint32_t epochs,
                                  std::uint64_t seed);

}  // namespace cogroute::netsim
