#include "cogroute/netsim/routing.hpp"

namespace cogroute::netsim {

std::vector<Candidate> route_blind(std::span<const Candidate> table) {
  return {table.begin(), table.end()};
}

std::vector<Candidate> route_cognitive(const cognition::CognitiveDomain& domain,
                                       std::span<const Candidate> table,
                                       const std::map<RouterId, double>& hop_costs) {
  if (table.empty()) return {};
  const cognition::Advice advice = domain.advise({{table.begin(), table.end()}, hop_costs});
  if (!advice.chosen) return route_blind(table);
  std::vector<Candidate> order;
  order.reserve(advice.ranked_hops.size());
  for (const auto& hop : advice.ranked_hops) order.push_back({hop.neighbor, hop.channel});
  return order;
}

ForwardingOutcome forward_with_retries(std::span<const Candidate> order,
                                       DataPacket& packet,
                                       int retry_limit,
                                       const std::function<bool(const Candidate&)>& transmit) {
  ForwardingOutcome out;
  for (const Candidate& c : order) {
    while (true) {
      const bool ok = transmit(c);
      out.attempts.push_back({c, ok});
      if (ok) {
        out.used = c;
        return out;
      }
      if (packet.retransmissions >= retry_limit) break;
      ++packet.retransmissions;
    }
  }
  return out;
}

}  // namespace cogroute::netsim
