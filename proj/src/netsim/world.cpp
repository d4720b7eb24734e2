#include "cogroute/netsim/world.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "cogroute/wire.hpp"

namespace cogroute::netsim {

std::string_view to_string(Mode mode) { return mode == Mode::Blind ? "blind" : "cognitive"; }

std::optional<RunMode> parse_run_mode(std::string_view text) {
  if (text == "blind") return RunMode::Blind;
  if (text == "cognitive") return RunMode::Cognitive;
  if (text == "compare") return RunMode::Compare;
  return std::nullopt;
}

double RunReport::delivery_ratio() const {
  return injected == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(injected);
}

double RunReport::mean_delay_ms() const {
  return delivered == 0 ? 0.0 : total_delay_ms / static_cast<double>(delivered);
}

double RunReport::prediction_bit_accuracy() const {
  return prediction_bits == 0 ? 0.0 : static_cast<double>(prediction_hits) / static_cast<double>(prediction_bits);
}

bool Decision::operator==(const Decision& other) const {
  if (epoch != other.epoch || packet_id != other.packet_id || router != other.router || dropped != other.dropped ||
      attempts.size() != other.attempts.size()) {
    return false;
  }
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    if (attempts[i].via != other.attempts[i].via || attempts[i].success != other.attempts[i].success) return false;
  }
  return true;
}

World::World(Scenario scenario, Mode mode, std::uint64_t seed, WorldOptions options)
    : scenario_(std::move(scenario)),
      mode_(mode),
      seed_(seed),
      options_(options),
      traffic_rng_(seed, "traffic", scenario_.params.traffic_seed),
      delivery_key_(splitmix64(seed ^ hash_name("delivery"))) {
  totals_.mode = mode;
  totals_.seed = seed;

  routers_.resize(scenario_.routers.size());
  for (std::size_t i = 0; i < scenario_.routers.size(); ++i) {
    RouterState& r = routers_[i];
    r.id = scenario_.routers[i];
    r.slot.fill(-1);
    index_of_[r.id] = i;
    if (mode_ == Mode::Cognitive) {
      cognition::LearnerParams lp;
      lp.n_states = scenario_.params.hmm_states;
      lp.window = scenario_.params.window;
      lp.em_iters = scenario_.params.em_iters;
      lp.tol = scenario_.params.tol;
      lp.seed = splitmix64(seed ^ (std::uint64_t{r.id} << 32));
      r.cognition.emplace(r.id, lp);
    }
  }

  channels_.reserve(scenario_.channels.size());
  for (std::size_t c = 0; c < scenario_.channels.size(); ++c) {
    const ChannelSpec& spec = scenario_.channels[c];
    channels_.push_back({RandomStream(seed, "channel", c), spec.dynamics.initial_state, {}, 0});
    RouterState& from = routers_[router_index(spec.from)];
    from.slot[spec.index - 1] = static_cast<int>(c);
    const auto key = std::make_pair(spec.from, spec.to);
    const auto it = link_of_.find(key);
    if (it == link_of_.end() || scenario_.channels[it->second].index > spec.index) link_of_[key] = c;
  }
  for (const auto& [key, c] : link_of_) {
    RouterState& from = routers_[router_index(key.first)];
    from.forward_neighbors.push_back(key.second);
    from.hop_costs[key.second] = scenario_.channels[c].base_delay_ms;
    routers_[router_index(key.second)].in_neighbors.push_back(router_index(key.first));
  }
  for (auto& r : routers_) std::sort(r.in_neighbors.begin(), r.in_neighbors.end());
}

std::size_t World::router_index(RouterId id) const {
  const auto it = index_of_.find(id);
  if (it == index_of_.end()) throw std::invalid_argument("unknown router " + std::to_string(id));
  return it->second;
}

fcpi::Fcpi World::measured_fcpi(RouterId router) const { return routers_[router_index(router)].measured; }

const std::vector<RouterId>& World::forward_neighbors(RouterId router) const {
  return routers_[router_index(router)].forward_neighbors;
}

const cognition::CognitiveDomain* World::cognitive_domain(RouterId router) const {
  const auto& r = routers_[router_index(router)];
  return r.cognition ? &*r.cognition : nullptr;
}

void World::inject(RouterId source, RouterId destination) {
  DataPacket p;
  p.id = next_packet_id_++;
  p.source = source;
  p.destination = destination;
  p.created_epoch = epoch_;
  routers_[router_index(source)].queue.push_back(p);
  ++totals_.injected;
}

void World::step_epoch() {
  EpochSample sample;
  sample.epoch = epoch_;

  advance_channels();
  disseminate(sample);

  for (const Flow& flow : scenario_.flows) {
    const int n = traffic_rng_.poisson(flow.rate);
    for (int k = 0; k < n; ++k) inject(flow.source, flow.destination);
    sample.injected += static_cast<std::uint64_t>(n);
  }

  forward_packets(sample);

  totals_.delivered += sample.delivered;
  totals_.dropped += sample.dropped;
  totals_.total_retransmissions += sample.retransmissions;
  totals_.cognitive_bytes += sample.cognitive_bytes;
  totals_.data_bytes += sample.data_bytes;
  totals_.series.push_back(sample);
  ++epoch_;
  totals_.epochs = epoch_;
}

void World::advance_channels() {
  std::vector<std::uint8_t> states;
  if (options_.record_ground_truth) states.reserve(channels_.size());
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    ChannelState& ch = channels_[c];
    const ChannelSpec& spec = scenario_.channels[c];
    ch.quality = static_cast<int>(ch.rng.categorical(spec.dynamics.transition[ch.quality]));
    const StateProfile& p = spec.dynamics.states[ch.quality];
    ch.metrics.available_bandwidth_fraction = std::clamp(ch.rng.normal(p.bandwidth, p.bandwidth_sd), 0.0, 1.0);
    ch.metrics.delay_ms = spec.base_delay_ms + std::max(0.0, ch.rng.normal(p.delay_ms, p.delay_sd_ms));
    ch.metrics.jitter_ms = std::max(0.0, ch.rng.normal(p.jitter_ms, p.jitter_sd_ms));
    ch.metrics.loss_fraction = std::clamp(ch.rng.normal(p.loss, p.loss_sd), 0.0, 1.0);
    ch.used = 0;
    if (options_.record_ground_truth) states.push_back(static_cast<std::uint8_t>(ch.quality));
  }
  if (options_.record_ground_truth) ground_truth_.push_back(std::move(states));

  for (RouterState& r : routers_) {
    std::array<fcpi::ChannelMetrics, fcpi::kChannels> metrics;
    for (int m = 0; m < fcpi::kChannels; ++m) {
      metrics[m] = r.slot[m] < 0 ? fcpi::ChannelMetrics::absent() : channels_[r.slot[m]].metrics;
    }
    r.measured = fcpi::synthesize_fcpi(metrics, scenario_.params.thresholds);
  }
}

void World::disseminate(EpochSample& sample) {
  const std::uint32_t interval = scenario_.params.cognitive_interval;
  if (interval == 0 || epoch_ % interval != 0) return;
  const std::uint32_t round = epoch_ / interval;

  for (const RouterState& sender : routers_) {
    std::array<fcpi::ChannelMetrics, fcpi::kChannels> metrics;
    for (int m = 0; m < fcpi::kChannels; ++m) {
      metrics[m] = sender.slot[m] < 0 ? fcpi::ChannelMetrics::absent() : channels_[sender.slot[m]].metrics;
    }
    const auto packet = cognition::emit_cognitive_packet(metrics, scenario_.params.thresholds, sender.id, round);
    const auto actual = fcpi::unpack(packet.fcpi);

    for (std::size_t receiver_index : sender.in_neighbors) {
      RouterState& receiver = routers_[receiver_index];
      // Score last round's prediction against what actually arrives.
      if (round > 0) {
        const fcpi::Fcpi predicted =
            receiver.cognition ? receiver.cognition->prediction(sender.id) : fcpi::Fcpi::all_up();
        const auto bits = fcpi::unpack(predicted);
        for (int m = 0; m < fcpi::kChannels; ++m) {
          if (sender.slot[m] < 0) continue;
          ++totals_.prediction_bits;
          if (bits[m] == actual[m]) ++totals_.prediction_hits;
        }
      }
      if (receiver.cognition) {
        const cognition::WireBytes wire = cognition::encode(packet);
        sample.cognitive_bytes += wire.size();
        receiver.cognition->receive(cognition::decode(wire));
      }
    }
  }

  if (mode_ == Mode::Cognitive && round > 0 && round % scenario_.params.retrain_every == 0) {
    for (RouterState& r : routers_) r.cognition->retrain_all();
  }
}

bool World::transmit(std::size_t channel, DataPacket& packet, std::uint32_t try_index, EpochSample& sample) {
  ChannelState& ch = channels_[channel];
  const ChannelSpec& spec = scenario_.channels[channel];
  sample.data_bytes += scenario_.params.data_packet_bytes;
  if (ch.used >= spec.capacity) return false;
  ++ch.used;
  packet.delay_ms += ch.metrics.delay_ms;
  // Keyed draw: a given packet's n-th try on a channel in an epoch sees the
  // same outcome whichever policy routed it there.
  std::uint64_t key = splitmix64(delivery_key_ ^ channel);
  key = splitmix64(key ^ epoch_);
  key = splitmix64(key ^ packet.id);
  key = splitmix64(key ^ try_index);
  const double u = static_cast<double>(key >> 11) * 0x1.0p-53;
  return !(u < spec.dynamics.states[ch.quality].loss);
}

void World::forward_packets(EpochSample& sample) {
  const SimParams& params = scenario_.params;
  for (RouterState& router : routers_) {
    std::deque<DataPacket> queue;
    queue.swap(router.queue);
    for (DataPacket& packet : queue) {
      const auto& table = scenario_.candidates_for(router.id, packet.destination);
      ForwardingOutcome outcome;
      if (packet.hops_taken < params.ttl && !table.empty()) {
        const std::vector<Candidate> order = mode_ == Mode::Blind
                                                 ? route_blind(table)
                                                 : route_cognitive(*router.cognition, table, router.hop_costs);
        std::map<std::size_t, std::uint32_t> tries;
        auto send = [&](std::size_t channel) { return transmit(channel, packet, tries[channel]++, sample); };
        outcome = forward_with_retries(order, packet, params.retry_limit, [&](const Candidate& c) {
          if (!send(link_of_.at({router.id, c.neighbor}))) return false;
          if (c.channel == 0) return true;
          const auto& via = routers_[router_index(c.neighbor)];
          return send(static_cast<std::size_t>(via.slot[c.channel - 1]));
        });
      }
      sample.retransmissions += outcome.retransmissions();
      if (options_.record_decisions) {
        decisions_.push_back({epoch_, packet.id, router.id, outcome.attempts, outcome.dropped()});
      }
      if (!outcome.used) {
        ++sample.dropped;
        continue;
      }
      const Candidate used = outcome.attempts.back().via;
      RouterId next = used.neighbor;
      packet.hops_taken += 1;
      if (used.channel != 0) {
        next = scenario_.channel(used.neighbor, used.channel)->to;
        packet.hops_taken += 1;
      }
      if (next == packet.destination) {
        packet.delivered = true;
        ++sample.delivered;
        totals_.total_delay_ms += packet.delay_ms;
      } else {
        routers_[router_index(next)].arriving.push_back(packet);
      }
    }
  }
  for (RouterState& router : routers_) {
    router.queue.insert(router.queue.end(), router.arriving.begin(), router.arriving.end());
    router.arriving.clear();
  }
}

RunReport World::report() const {
  RunReport out = totals_;
  out.in_flight = 0;
  for (const auto& r : routers_) out.in_flight += r.queue.size();
  return out;
}

RunReport run_mode(const Scenario& scenario, std::uint32_t epochs, std::uint64_t seed, Mode mode) {
  World world(scenario, mode, seed);
  for (std::uint32_t e = 0; e < epochs; ++e) world.step_epoch();
  return world.report();
}

std::vector<RunReport> run(const Scenario& scenario, std::uint32_t epochs, std::uint64_t seed, RunMode mode) {
  std::vector<RunReport> out;
  if (mode != RunMode::Cognitive) out.push_back(run_mode(scenario, epochs, seed, Mode::Blind));
  if (mode != RunMode::Blind) out.push_back(run_mode(scenario, epochs, seed, Mode::Cognitive));
  return out;
}

PredictionTrace trace_predictions(const Scenario& scenario,
                                  RouterId router,
                                  std::optional<RouterId> neighbor,
                                  std::uint32_t epochs,
                                  std::uint64_t seed) {
  World world(scenario, Mode::Cognitive, seed);
  PredictionTrace trace;
  trace.router = router;
  const auto& forward = world.forward_neighbors(router);
  if (neighbor) {
    if (std::find(forward.begin(), forward.end(), *neighbor) == forward.end()) {
      throw std::invalid_argument("router " + std::to_string(router) + " has no channel to router " +
                                  std::to_string(*neighbor));
    }
    trace.neighbors = {*neighbor};
  } else {
    trace.neighbors = forward;
  }
  trace.values.resize(trace.neighbors.size());
  for (std::uint32_t e = 0; e < epochs; ++e) {
    world.step_epoch();
    const auto* domain = world.cognitive_domain(router);
    for (std::size_t i = 0; i < trace.neighbors.size(); ++i) {
      trace.values[i].push_back(domain->prediction(trace.neighbors[i]).value());
    }
  }
  return trace;
}

}  // namespace cogroute::netsim
