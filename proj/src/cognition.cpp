#include "cogroute/cognition.hpp"

#include <algorithm>
#include <limits>

#include "cogroute/rng.hpp"

namespace cogroute::cognition {

namespace {

// Upper bound on slots synthesized for one gap, so a corrupt epoch cannot
// allocate unbounded history.
constexpr std::uint32_t kMaxGapFill = 1u << 16;

std::span<const hmm::Symbol> tail(const hmm::ObservationSequence& seq, std::size_t window) {
  const std::size_t n = std::min(seq.size(), std::max<std::size_t>(window, 2));
  return std::span<const hmm::Symbol>(seq).last(n);
}

}  // namespace

bool ingest_cognitive_packet(NeighborStore& store, const CognitivePacket& packet) {
  auto [it, inserted] = store.try_emplace(packet.sender_id);
  NeighborHistory& history = it->second;
  if (inserted) history.neighbor_id = packet.sender_id;

  if (history.last_epoch_seen && packet.epoch <= *history.last_epoch_seen) return false;

  if (history.last_epoch_seen && history.length() > 0) {
    const std::uint32_t gap = std::min(packet.epoch - *history.last_epoch_seen - 1, kMaxGapFill);
    for (auto& seq : history.observed) {
      const hmm::Symbol last = seq.back();
      seq.insert(seq.end(), gap, last);
    }
  }
  const fcpi::ChannelBits bits = fcpi::unpack(packet.fcpi);
  for (int m = 0; m < fcpi::kChannels; ++m) history.observed[m].push_back(bits[m]);
  history.last_epoch_seen = packet.epoch;
  return true;
}

void retrain(NeighborHistory& history, const LearnerParams& params) {
  if (history.length() < 2) return;
  for (int m = 0; m < fcpi::kChannels; ++m) {
    const auto window = tail(history.observed[m], params.window);
    const std::vector<hmm::ObservationSequence> training{{window.begin(), window.end()}};
    auto& model = history.models[m];
    if (!model) {
      const std::uint64_t seed =
          splitmix64(params.seed ^ (std::uint64_t{history.neighbor_id} << 8) ^ static_cast<std::uint64_t>(m));
      model = hmm::init_model(params.n_states, 2, seed);
    }
    model = hmm::baum_welch(*model, training, params.em_iters, params.tol).model;
  }
}

fcpi::Fcpi predict_neighbor_fcpi(const NeighborHistory& history, std::size_t window) {
  if (history.length() == 0) return fcpi::Fcpi::all_up();
  fcpi::ChannelBits bits{};
  for (int m = 0; m < fcpi::kChannels; ++m) {
    const auto& model = history.models[m];
    bits[m] = model ? hmm::predict_next_symbol(*model, tail(history.observed[m], window)).symbol : 1;
  }
  return fcpi::pack(bits);
}

Advice advise(const std::map<RouterId, fcpi::Fcpi>& predictions, const AdviceRequest& request) {
  Advice advice;
  advice.ranked_hops.reserve(request.candidates.size());
  for (const Candidate& c : request.candidates) {
    const auto it = predictions.find(c.neighbor);
    const fcpi::Fcpi predicted = it == predictions.end() ? fcpi::Fcpi::all_up() : it->second;
    const bool up = c.channel == 0 || fcpi::channel_up(predicted, c.channel);
    advice.ranked_hops.push_back({c.neighbor, c.channel, predicted, up});
  }

  auto cost = [&](RouterId id) {
    const auto it = request.hop_costs.find(id);
    return it == request.hop_costs.end() ? std::numeric_limits<double>::infinity() : it->second;
  };
  std::stable_sort(advice.ranked_hops.begin(), advice.ranked_hops.end(),
                   [&](const RankedHop& a, const RankedHop& b) {
                     if (a.required_channel_up != b.required_channel_up) return a.required_channel_up;
                     const double ca = cost(a.neighbor);
                     const double cb = cost(b.neighbor);
                     if (ca != cb) return ca < cb;
                     return a.neighbor < b.neighbor;
                   });

  if (!advice.ranked_hops.empty() && advice.ranked_hops.front().required_channel_up) {
    advice.chosen = advice.ranked_hops.front().neighbor;
  }
  return advice;
}

CognitivePacket emit_cognitive_packet(std::span<const fcpi::ChannelMetrics> self_metrics,
                                      const fcpi::QosThresholds& thresholds,
                                      RouterId self_id,
                                      std::uint32_t epoch) {
  CognitivePacket packet;
  packet.sender_id = self_id;
  packet.epoch = epoch;
  packet.fcpi = fcpi::synthesize_fcpi(self_metrics, thresholds);
  return packet;
}

CognitiveDomain::CognitiveDomain(RouterId self, LearnerParams params)
    : self_(self), params_(params) {}

bool CognitiveDomain::receive(const CognitivePacket& packet) {
  if (!ingest_cognitive_packet(store_, packet)) return false;
  refresh(store_.at(packet.sender_id));
  return true;
}

void CognitiveDomain::retrain_all() {
  for (auto& [id, history] : store_) {
    retrain(history, params_);
    refresh(history);
  }
}

fcpi::Fcpi CognitiveDomain::prediction(RouterId neighbor) const {
  const auto it = predictions_.find(neighbor);
  return it == predictions_.end() ? fcpi::Fcpi::all_up() : it->second;
}

Advice CognitiveDomain::advise(const AdviceRequest& request) const {
  Advice advice = cognition::advise(predictions_, request);
  if (planner_) planner_(request, advice);
  return advice;
}

void CognitiveDomain::refresh(const NeighborHistory& history) {
  predictions_[history.neighbor_id] = predict_neighbor_fcpi(history, params_.window);
}

}  // namespace cogroute::cognition
