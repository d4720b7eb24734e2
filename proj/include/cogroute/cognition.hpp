#pragma once

// The cognitive domain of one router. Learns each neighbor's outgoing-channel
// health from the Cognitive Packets that neighbor sends, predicts its next
// FCPI, and ranks candidate next hops for the router administrator.
//
// One HMM per (neighbor, channel) with binary observations; the predicted
// byte is assembled bit by bit.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cogroute/fcpi.hpp"
#include "cogroute/hmm.hpp"
#include "cogroute/wire.hpp"

namespace cogroute::cognition {

struct LearnerParams {
  int n_states = 3;
  /// Most recent observations used for training and filtering.
  std::size_t window = 200;
  int em_iters = 10;
  double tol = 1e-4;
  /// Mixed with neighbor id and channel to seed fresh models.
  std::uint64_t seed = 0;
};

struct NeighborHistory {
  RouterId neighbor_id = 0;
  /// observed[i] is the bit sequence of channel C(i+1); all eight have equal length.
  std::array<hmm::ObservationSequence, fcpi::kChannels> observed;
  /// Empty until the first retrain.
  std::array<std::optional<hmm::HmmModel>, fcpi::kChannels> models;
  std::optional<std::uint32_t> last_epoch_seen;

  std::size_t length() const { return observed[0].size(); }
};

using NeighborStore = std::map<RouterId, NeighborHistory>;

/// Appends the packet's bits to the sender's history, creating it on first
/// contact. Skipped rounds are filled by repeating the last observation.
/// Returns false (store untouched) for duplicate or out-of-order epochs.
bool ingest_cognitive_packet(NeighborStore& store, const CognitivePacket& packet);

/// Re-fits each channel model with Baum-Welch on the last `params.window`
/// observations, warm-starting from the current model. No-op while the
/// history is shorter than 2.
void retrain(NeighborHistory& history, const LearnerParams& params);

/// Bitwise argmax of each channel's next-symbol prediction. Channels with no
/// model or no history predict up, so a cold learner reports 255.
fcpi::Fcpi predict_neighbor_fcpi(const NeighborHistory& history, std::size_t window = 200);

/// A candidate next hop: forward through `neighbor`, which then transmits on
/// its channel `channel`. Channel 0 marks a neighbor that is itself the
/// destination, so no forward channel is required.
struct Candidate {
  RouterId neighbor = 0;
  int channel = 0;

  bool operator==(const Candidate&) const = default;
};

struct AdviceRequest {
  std::vector<Candidate> candidates;
  /// Missing neighbors rank after every costed one.
  std::map<RouterId, double> hop_costs;
};

struct RankedHop {
  RouterId neighbor = 0;
  int channel = 0;
  fcpi::Fcpi predicted_fcpi;
  bool required_channel_up = true;
};

struct Advice {
  std::vector<RankedHop> ranked_hops;
  std::optional<RouterId> chosen;
};

/// Candidates whose required channel is predicted up come first; each group
/// is ordered by (hop cost, neighbor id), stable for equal keys. Neighbors
/// without a prediction are treated as 255.
Advice advise(const std::map<RouterId, fcpi::Fcpi>& predictions, const AdviceRequest& request);

/// The packet a router sends its neighbors: the FCPI of its own outgoing channels.
CognitivePacket emit_cognitive_packet(std::span<const fcpi::ChannelMetrics> self_metrics,
                                      const fcpi::QosThresholds& thresholds,
                                      RouterId self_id,
                                      std::uint32_t epoch);

/// Learner plus advisor for one router. Owned and mutated by a single router.
class CognitiveDomain {
public:
  /// Hook run on every Advice before it is returned. No planner ships with
  /// the simulator; this is where QoS/demand planning would plug in.
  using Planner = std::function<void(const AdviceRequest&, Advice&)>;

  CognitiveDomain(RouterId self, LearnerParams params);

  RouterId self() const { return self_; }
  const LearnerParams& params() const { return params_; }

  /// Ingests and refreshes the sender's cached prediction. Returns false for
  /// dropped packets.
  bool receive(const CognitivePacket& packet);

  void retrain_all();

  /// 255 for neighbors never heard from.
  fcpi::Fcpi prediction(RouterId neighbor) const;
  const std::map<RouterId, fcpi::Fcpi>& predictions() const { return predictions_; }
  const NeighborStore& store() const { return store_; }

  Advice advise(const AdviceRequest& request) const;

  void set_planner(Planner planner) { planner_ = std::move(planner); }

private:
  void refresh(const NeighborHistory& history);

  RouterId self_;
  LearnerParams params_;
  NeighborStore store_;
  std::map<RouterId, fcpi::Fcpi> predictions_;
  Planner planner_;
};

}  // namespace cogroute::cognition
