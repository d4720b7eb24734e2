#pragma once

// The router administrator's two forwarding policies. Both produce an
// ordered list of next hops and share one retry policy; only the order
// differs.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cogroute/cognition.hpp"

namespace cogroute::netsim {

using cognition::Candidate;
using cognition::RouterId;

struct DataPacket {
  std::uint64_t id = 0;
  RouterId source = 0;
  RouterId destination = 0;
  std::uint32_t created_epoch = 0;
  int hops_taken = 0;
  /// Same-link resends used so far; never exceeds the retry limit.
  int retransmissions = 0;
  bool delivered = false;
  double delay_ms = 0.0;
};

struct Attempt {
  Candidate via;
  bool success = false;
};

struct ForwardingOutcome {
  std::vector<Attempt> attempts;
  /// Candidate that carried the packet; empty when it was dropped.
  std::optional<Candidate> used;

  bool dropped() const { return !used; }
  /// Every transmission after the first one of this decision, whether it
  /// repeated the same link or moved to an alternative.
  std::size_t retransmissions() const { return attempts.empty() ? 0 : attempts.size() - 1; }
};

/// Blind order: the configured table as is.
std::vector<Candidate> route_blind(std::span<const Candidate> table);

/// Cognitive order: the advisor's ranking. When the advisor chooses nothing
/// (no candidate predicted up) the blind order is used, so the packet is
/// still forwarded.
std::vector<Candidate> route_cognitive(const cognition::CognitiveDomain& domain,
                                       std::span<const Candidate> table,
                                       const std::map<RouterId, double>& hop_costs);

/// Tries candidates in order. A failed candidate is retried while the packet
/// still has retry budget; once the budget is spent each remaining candidate
/// gets a single attempt. `transmit` performs one attempt and reports success.
ForwardingOutcome forward_with_retries(std::span<const Candidate> order,
                                       DataPacket& packet,
                                       int retry_limit,
                                       const std::function<bool(const Candidate&)>& transmit);

}  // namespace cogroute::netsim
