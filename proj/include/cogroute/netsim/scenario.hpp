#pragma once

// Scenario description: routers, directed channels with Markov-modulated
// ground-truth quality, static candidate next-hop tables, traffic and run
// parameters. Loaded from a single JSON document.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cogroute/cognition.hpp"
#include "cogroute/fcpi.hpp"

namespace cogroute::netsim {

using cognition::Candidate;
using cognition::RouterId;

inline constexpr int kQualityStates = 3;  // good, degraded, bad

/// Metric distribution of a channel while its hidden quality is in one state.
struct StateProfile {
  std::string name;
  /// Ground-truth per-transmission loss probability in this state.
  double loss = 0.0;
  double loss_sd = 0.0;
  double bandwidth = 1.0;
  double bandwidth_sd = 0.0;
  double delay_ms = 0.0;
  double delay_sd_ms = 0.0;
  double jitter_ms = 0.0;
  double jitter_sd_ms = 0.0;
};

struct ChannelDynamics {
  std::array<std::array<double, kQualityStates>, kQualityStates> transition{};
  std::array<StateProfile, kQualityStates> states{};
  int initial_state = 0;
};

struct ChannelSpec {
  RouterId from = 0;
  int index = 1;  // Cm, m in [1,8]
  RouterId to = 0;
  /// Transmissions the channel carries per epoch; further attempts fail.
  int capacity = 1000;
  double base_delay_ms = 1.0;
  ChannelDynamics dynamics;

  std::string label() const;
};

struct Flow {
  RouterId source = 0;
  RouterId destination = 0;
  /// Mean packets injected per epoch (Poisson).
  double rate = 0.0;
};

struct SimParams {
  /// Epochs between Cognitive Packet rounds; 0 disables dissemination.
  std::uint32_t cognitive_interval = 5;
  /// Dissemination rounds between retrains.
  std::uint32_t retrain_every = 10;
  std::size_t window = 200;
  int em_iters = 10;
  double tol = 1e-4;
  int hmm_states = 3;
  fcpi::QosThresholds thresholds;
  /// Same-link retransmissions a packet may use over its lifetime.
  int retry_limit = 2;
  int ttl = 16;
  std::size_t max_candidates = 3;
  std::uint32_t data_packet_bytes = 1500;
  std::uint64_t traffic_seed = 0;
};

struct Scenario {
  std::string name;
  std::vector<RouterId> routers;
  std::vector<ChannelSpec> channels;
  /// (router, destination) -> ordered next hops. Kept sorted by (cost of the
  /// router's link to the neighbor, neighbor id), stable otherwise.
  std::map<std::pair<RouterId, RouterId>, std::vector<Candidate>> candidates;
  std::vector<Flow> flows;
  SimParams params;

  /// Lowest-index channel from `from` to `to`, or nullptr.
  const ChannelSpec* link(RouterId from, RouterId to) const;
  /// Channel Cm of `router`, or nullptr.
  const ChannelSpec* channel(RouterId router, int index) const;
  const std::vector<Candidate>& candidates_for(RouterId router, RouterId destination) const;
};

struct Issue {
  std::string location;  // JSON pointer into the document
  std::string message;
};

class ScenarioError : public std::runtime_error {
public:
  ScenarioError(std::string origin, std::vector<Issue> issues);

  const std::string& origin() const { return origin_; }
  const std::vector<Issue>& issues() const { return issues_; }

private:
  std::string origin_;
  std::vector<Issue> issues_;
};

/// Parses and validates; throws ScenarioError listing every problem found.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<memory>");

/// Reads `path`; "default" and other bare names resolve to bundled scenarios.
Scenario load_scenario(const std::filesystem::path& path);

/// Bundled scenario directory, or a bundled file name resolved against it.
std::filesystem::path resolve_scenario_path(const std::filesystem::path& path);

}  // namespace cogroute::netsim
