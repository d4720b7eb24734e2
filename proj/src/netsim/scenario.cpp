#include "cogroute/netsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cogroute::netsim {

using nlohmann::json;

std::string ChannelSpec::label() const {
  return "R" + std::to_string(from) + ".C" + std::to_string(index) + "->R" + std::to_string(to);
}

const ChannelSpec* Scenario::link(RouterId from, RouterId to) const {
  const ChannelSpec* best = nullptr;
  for (const auto& c : channels) {
    if (c.from == from && c.to == to && (!best || c.index < best->index)) best = &c;
  }
  return best;
}

const ChannelSpec* Scenario::channel(RouterId router, int index) const {
  for (const auto& c : channels) {
    if (c.from == router && c.index == index) return &c;
  }
  return nullptr;
}

const std::vector<Candidate>& Scenario::candidates_for(RouterId router, RouterId destination) const {
  static const std::vector<Candidate> kNone;
  const auto it = candidates.find({router, destination});
  return it == candidates.end() ? kNone : it->second;
}

namespace {

std::string describe(const std::vector<Issue>& issues) {
  std::string out = std::to_string(issues.size()) + " problem(s)";
  for (const auto& i : issues) out += "\n  " + i.location + ": " + i.message;
  return out;
}

// Walks the document collecting every problem instead of stopping at the first.
class Reader {
public:
  std::vector<Issue> issues;

  void fail(const std::string& where, std::string message) { issues.push_back({where, std::move(message)}); }

  bool has(const json& obj, const char* key) const { return obj.is_object() && obj.contains(key); }

  std::optional<double> number(const json& obj, const std::string& where, const char* key, bool required,
                               double lo, double hi) {
    const std::string at = where + "/" + key;
    if (!has(obj, key)) {
      if (required) fail(at, "missing required field");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(at, "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < lo || d > hi) {
      std::ostringstream msg;
      msg << "value " << d << " outside [" << lo << ", " << hi << "]";
      fail(at, msg.str());
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> integer(const json& obj, const std::string& where, const char* key, bool required,
                                   long long lo, long long hi) {
    const std::string at = where + "/" + key;
    if (!has(obj, key)) {
      if (required) fail(at, "missing required field");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(at, "expected an integer");
      return std::nullopt;
    }
    const long long i = v.get<long long>();
    if (i < lo || i > hi) {
      fail(at, "value " + std::to_string(i) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return i;
  }

  void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
    if (!obj.is_object()) return;
    for (const auto& [key, value] : obj.items()) {
      if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
        fail(where + "/" + key, "unknown field");
      }
    }
  }
};

constexpr long long kMaxRouterId = 65535;

std::optional<ChannelDynamics> read_dynamics(Reader& r, const json& obj, const std::string& where,
                                              const std::string& owner) {
  if (!obj.is_object()) {
    r.fail(where, "dynamics must be an object");
    return std::nullopt;
  }
  r.reject_unknown(obj, where, {"transition", "states", "initial_state"});
  const std::size_t before = r.issues.size();
  ChannelDynamics d;

  const std::string tat = where + "/transition";
  if (!r.has(obj, "transition") || !obj.at("transition").is_array() ||
      obj.at("transition").size() != kQualityStates) {
    r.fail(tat, owner + ": transition must be a 3x3 array");
  } else {
    for (int i = 0; i < kQualityStates; ++i) {
      const json& row = obj.at("transition").at(i);
      const std::string rat = tat + "/" + std::to_string(i);
      if (!row.is_array() || row.size() != kQualityStates ||
          !std::all_of(row.begin(), row.end(), [](const json& v) { return v.is_number(); })) {
        r.fail(rat, owner + ": transition row must hold 3 numbers");
        continue;
      }
      double sum = 0.0;
      bool in_range = true;
      for (int j = 0; j < kQualityStates; ++j) {
        d.transition[i][j] = row.at(j).get<double>();
        in_range = in_range && d.transition[i][j] >= 0.0 && d.transition[i][j] <= 1.0;
        sum += d.transition[i][j];
      }
      if (!in_range) r.fail(rat, owner + ": transition probabilities must lie in [0,1]");
      if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << owner << ": transition row " << i << " sums to " << sum << ", expected 1";
        r.fail(rat, msg.str());
      }
    }
  }

  const std::string sat = where + "/states";
  if (!r.has(obj, "states") || !obj.at("states").is_array() || obj.at("states").size() != kQualityStates) {
    r.fail(sat, owner + ": states must list 3 profiles (good, degraded, bad)");
  } else {
    for (int i = 0; i < kQualityStates; ++i) {
      const json& s = obj.at("states").at(i);
      const std::string at = sat + "/" + std::to_string(i);
      if (!s.is_object()) {
        r.fail(at, owner + ": state profile must be an object");
        continue;
      }
      r.reject_unknown(s, at, {"name", "loss", "loss_sd", "bandwidth", "bandwidth_sd", "delay_ms",
                               "delay_sd_ms", "jitter_ms", "jitter_sd_ms"});
      StateProfile& p = d.states[i];
      p.name = s.value("name", std::string(i == 0 ? "good" : i == 1 ? "degraded" : "bad"));
      constexpr double kBig = 1e9;
      p.loss = r.number(s, at, "loss", true, 0.0, 1.0).value_or(0.0);
      p.loss_sd = r.number(s, at, "loss_sd", false, 0.0, 1.0).value_or(0.0);
      p.bandwidth = r.number(s, at, "bandwidth", true, 0.0, 1.0).value_or(1.0);
      p.bandwidth_sd = r.number(s, at, "bandwidth_sd", false, 0.0, 1.0).value_or(0.0);
      p.delay_ms = r.number(s, at, "delay_ms", false, 0.0, kBig).value_or(0.0);
      p.delay_sd_ms = r.number(s, at, "delay_sd_ms", false, 0.0, kBig).value_or(0.0);
      p.jitter_ms = r.number(s, at, "jitter_ms", false, 0.0, kBig).value_or(0.0);
      p.jitter_sd_ms = r.number(s, at, "jitter_sd_ms", false, 0.0, kBig).value_or(0.0);
    }
  }
  d.initial_state = static_cast<int>(r.integer(obj, where, "initial_state", false, 0, kQualityStates - 1).value_or(0));

  if (r.issues.size() != before) return std::nullopt;
  return d;
}

void read_params(Reader& r, const json& obj, SimParams& p) {
  const std::string at = "/params";
  if (!obj.is_object()) {
    r.fail(at, "params must be an object");
    return;
  }
  r.reject_unknown(obj, at, {"cognitive_interval", "retrain_every", "window", "em_iters", "tol", "hmm_states",
                             "thresholds", "retry_limit", "ttl", "max_candidates", "data_packet_bytes"});
  constexpr long long kU32 = 4294967295LL;
  if (auto v = r.integer(obj, at, "cognitive_interval", false, 0, kU32)) p.cognitive_interval = static_cast<std::uint32_t>(*v);
  if (auto v = r.integer(obj, at, "retrain_every", false, 1, kU32)) p.retrain_every = static_cast<std::uint32_t>(*v);
  if (auto v = r.integer(obj, at, "window", false, 2, 1000000)) p.window = static_cast<std::size_t>(*v);
  if (auto v = r.integer(obj, at, "em_iters", false, 1, 10000)) p.em_iters = static_cast<int>(*v);
  if (auto v = r.number(obj, at, "tol", false, 1e-300, 1e9)) p.tol = *v;
  if (auto v = r.integer(obj, at, "hmm_states", false, 1, 64)) p.hmm_states = static_cast<int>(*v);
  if (auto v = r.integer(obj, at, "retry_limit", false, 0, 1000)) p.retry_limit = static_cast<int>(*v);
  if (auto v = r.integer(obj, at, "ttl", false, 1, 100000)) p.ttl = static_cast<int>(*v);
  if (auto v = r.integer(obj, at, "max_candidates", false, 1, 64)) p.max_candidates = static_cast<std::size_t>(*v);
  if (auto v = r.integer(obj, at, "data_packet_bytes", false, 1, 1 << 20)) p.data_packet_bytes = static_cast<std::uint32_t>(*v);

  if (r.has(obj, "thresholds")) {
    const json& t = obj.at("thresholds");
    const std::string tat = at + "/thresholds";
    r.reject_unknown(t, tat, {"min_bandwidth_fraction", "max_delay_ms", "max_jitter_ms", "max_loss_fraction"});
    if (auto v = r.number(t, tat, "min_bandwidth_fraction", false, 1e-12, 1.0)) p.thresholds.min_bandwidth_fraction = *v;
    if (auto v = r.number(t, tat, "max_delay_ms", false, 1e-12, 1e9)) p.thresholds.max_delay_ms = *v;
    if (auto v = r.number(t, tat, "max_jitter_ms", false, 1e-12, 1e9)) p.thresholds.max_jitter_ms = *v;
    if (auto v = r.number(t, tat, "max_loss_fraction", false, 1e-12, 1.0)) p.thresholds.max_loss_fraction = *v;
  }
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

ScenarioError::ScenarioError(std::string origin, std::vector<Issue> issues)
    : std::runtime_error(origin + ": " + describe(issues)), origin_(std::move(origin)), issues_(std::move(issues)) {}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(origin, {{"line " + std::to_string(line_of(text, e.byte)), e.what()}});
  }

  Reader r;
  Scenario s;
  if (!doc.is_object()) throw ScenarioError(origin, {{"/", "scenario must be a JSON object"}});
  r.reject_unknown(doc, "", {"name", "routers", "profiles", "channels", "candidates", "traffic", "params"});
  s.name = doc.value("name", std::string("unnamed"));

  // routers
  std::set<RouterId> routers;
  if (!doc.contains("routers") || !doc.at("routers").is_array() || doc.at("routers").empty()) {
    r.fail("/routers", "routers must be a non-empty array of ids");
  } else {
    const json& arr = doc.at("routers");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string at = "/routers/" + std::to_string(i);
      if (!arr[i].is_number_integer() || arr[i].get<long long>() < 0 || arr[i].get<long long>() > kMaxRouterId) {
        r.fail(at, "router id must be an integer in [0, 65535]");
        continue;
      }
      const auto id = static_cast<RouterId>(arr[i].get<long long>());
      if (!routers.insert(id).second) r.fail(at, "duplicate router id " + std::to_string(id));
      else s.routers.push_back(id);
    }
  }
  auto known = [&](long long id) { return id >= 0 && id <= kMaxRouterId && routers.count(static_cast<RouterId>(id)); };

  if (doc.contains("params")) read_params(r, doc.at("params"), s.params);

  // profiles
  std::map<std::string, std::optional<ChannelDynamics>> profiles;
  if (doc.contains("profiles")) {
    if (!doc.at("profiles").is_object()) {
      r.fail("/profiles", "profiles must be an object of named dynamics");
    } else {
      for (const auto& [name, body] : doc.at("profiles").items()) {
        profiles[name] = read_dynamics(r, body, "/profiles/" + name, "profile '" + name + "'");
      }
    }
  }

  // channels
  std::set<std::pair<RouterId, int>> slots;
  if (!doc.contains("channels") || !doc.at("channels").is_array()) {
    r.fail("/channels", "channels must be an array");
  } else {
    const json& arr = doc.at("channels");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const json& c = arr[i];
      const std::string at = "/channels/" + std::to_string(i);
      if (!c.is_object()) {
        r.fail(at, "channel must be an object");
        continue;
      }
      r.reject_unknown(c, at, {"from", "index", "to", "capacity", "base_delay_ms", "profile", "dynamics"});
      const std::size_t before = r.issues.size();
      const auto from = r.integer(c, at, "from", true, 0, kMaxRouterId);
      const auto index = r.integer(c, at, "index", true, 1, fcpi::kChannels);
      const auto to = r.integer(c, at, "to", true, 0, kMaxRouterId);
      ChannelSpec spec;
      if (from) spec.from = static_cast<RouterId>(*from);
      if (index) spec.index = static_cast<int>(*index);
      if (to) spec.to = static_cast<RouterId>(*to);
      const std::string owner = "channel " + spec.label();
      if (from && !known(*from)) r.fail(at + "/from", owner + ": unknown router id " + std::to_string(*from));
      if (to && !known(*to)) r.fail(at + "/to", owner + ": unknown router id " + std::to_string(*to));
      if (from && to && *from == *to) r.fail(at, owner + ": channel loops back to its own router");
      if (from && index && !slots.insert({spec.from, spec.index}).second) {
        r.fail(at + "/index", owner + ": duplicate channel index " + std::to_string(spec.index) + " on router " +
                                  std::to_string(spec.from));
      }
      spec.capacity = static_cast<int>(r.integer(c, at, "capacity", false, 1, 1 << 30).value_or(spec.capacity));
      spec.base_delay_ms = r.number(c, at, "base_delay_ms", false, 0.0, 1e9).value_or(spec.base_delay_ms);
      // Bad dynamics still leave the channel referable, so candidate checks
      // do not pile follow-on errors onto it.
      const bool structural_ok = r.issues.size() == before;

      std::optional<ChannelDynamics> dyn;
      if (c.contains("dynamics") && c.contains("profile")) {
        r.fail(at, owner + ": give either dynamics or profile, not both");
      } else if (c.contains("dynamics")) {
        dyn = read_dynamics(r, c.at("dynamics"), at + "/dynamics", owner);
      } else if (c.contains("profile")) {
        const json& p = c.at("profile");
        const auto it = p.is_string() ? profiles.find(p.get<std::string>()) : profiles.end();
        if (it == profiles.end()) r.fail(at + "/profile", owner + ": unknown dynamics profile " + p.dump());
        else dyn = it->second;  // errors inside the profile are reported once, at the profile
      } else {
        r.fail(at, owner + ": missing dynamics or profile");
      }
      if (dyn) spec.dynamics = *dyn;
      if (structural_ok) s.channels.push_back(spec);
    }
  }

  // candidates
  if (doc.contains("candidates")) {
    const json& arr = doc.at("candidates");
    if (!arr.is_array()) r.fail("/candidates", "candidates must be an array");
    for (std::size_t i = 0; arr.is_array() && i < arr.size(); ++i) {
      const json& e = arr[i];
      const std::string at = "/candidates/" + std::to_string(i);
      r.reject_unknown(e, at, {"router", "destination", "next_hops"});
      const auto router = r.integer(e, at, "router", true, 0, kMaxRouterId);
      const auto dest = r.integer(e, at, "destination", true, 0, kMaxRouterId);
      if (!router || !dest) continue;
      if (!known(*router)) r.fail(at + "/router", "unknown router id " + std::to_string(*router));
      if (!known(*dest)) r.fail(at + "/destination", "unknown router id " + std::to_string(*dest));
      if (*router == *dest) r.fail(at, "router cannot list next hops to itself");
      const auto key = std::make_pair(static_cast<RouterId>(*router), static_cast<RouterId>(*dest));
      if (s.candidates.count(key)) {
        r.fail(at, "duplicate table for router " + std::to_string(*router) + " destination " + std::to_string(*dest));
        continue;
      }
      if (!r.has(e, "next_hops") || !e.at("next_hops").is_array()) {
        r.fail(at + "/next_hops", "next_hops must be an array");
        continue;
      }
      const json& hops = e.at("next_hops");
      if (hops.size() > s.params.max_candidates) {
        r.fail(at + "/next_hops", std::to_string(hops.size()) + " next hops exceed max_candidates " +
                                      std::to_string(s.params.max_candidates));
      }
      std::vector<Candidate> table;
      for (std::size_t h = 0; h < hops.size(); ++h) {
        const std::string hat = at + "/next_hops/" + std::to_string(h);
        r.reject_unknown(hops[h], hat, {"neighbor", "channel"});
        const auto nb = r.integer(hops[h], hat, "neighbor", true, 0, kMaxRouterId);
        const auto ch = r.integer(hops[h], hat, "channel", true, 0, fcpi::kChannels);
        if (!nb || !ch) continue;
        const Candidate cand{static_cast<RouterId>(*nb), static_cast<int>(*ch)};
        if (!known(*nb)) {
          r.fail(hat + "/neighbor", "unknown router id " + std::to_string(*nb));
          continue;
        }
        if (!s.link(key.first, cand.neighbor)) {
          r.fail(hat, "router " + std::to_string(key.first) + " has no channel to " + std::to_string(cand.neighbor));
        }
        if (cand.neighbor == key.second && cand.channel != 0) {
          r.fail(hat + "/channel", "the destination itself is reached with channel 0");
        } else if (cand.neighbor != key.second && cand.channel == 0) {
          r.fail(hat + "/channel", "channel 0 is reserved for the destination itself");
        } else if (cand.channel != 0 && !s.channel(cand.neighbor, cand.channel)) {
          r.fail(hat + "/channel", "router " + std::to_string(cand.neighbor) + " has no channel " +
                                       std::to_string(cand.channel));
        }
        table.push_back(cand);
      }
      s.candidates[key] = std::move(table);
    }
  }

  // traffic
  if (doc.contains("traffic")) {
    const json& t = doc.at("traffic");
    r.reject_unknown(t, "/traffic", {"flows", "seed"});
    if (auto v = r.integer(t, "/traffic", "seed", false, 0, std::numeric_limits<long long>::max())) {
      s.params.traffic_seed = static_cast<std::uint64_t>(*v);
    }
    if (!r.has(t, "flows") || !t.at("flows").is_array()) {
      r.fail("/traffic/flows", "flows must be an array");
    } else {
      const json& arr = t.at("flows");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = "/traffic/flows/" + std::to_string(i);
        r.reject_unknown(arr[i], at, {"source", "destination", "rate"});
        const auto src = r.integer(arr[i], at, "source", true, 0, kMaxRouterId);
        const auto dst = r.integer(arr[i], at, "destination", true, 0, kMaxRouterId);
        const auto rate = r.number(arr[i], at, "rate", true, 0.0, 1000.0);
        if (!src || !dst || !rate) continue;
        if (!known(*src)) r.fail(at + "/source", "unknown router id " + std::to_string(*src));
        if (!known(*dst)) r.fail(at + "/destination", "unknown router id " + std::to_string(*dst));
        if (*src == *dst) r.fail(at, "flow source equals destination");
        s.flows.push_back({static_cast<RouterId>(*src), static_cast<RouterId>(*dst), *rate});
      }
    }
  }

  if (!r.issues.empty()) throw ScenarioError(origin, std::move(r.issues));

  for (auto& [key, table] : s.candidates) {
    const RouterId router = key.first;
    std::stable_sort(table.begin(), table.end(), [&](const Candidate& a, const Candidate& b) {
      const double ca = s.link(router, a.neighbor)->base_delay_ms;
      const double cb = s.link(router, b.neighbor)->base_delay_ms;
      if (ca != cb) return ca < cb;
      return a.neighbor < b.neighbor;
    });
  }
  return s;
}

std::filesystem::path resolve_scenario_path(const std::filesystem::path& path) {
  if (path.has_parent_path() || path.has_extension() || std::filesystem::exists(path)) return path;
  return std::filesystem::path(COGROUTE_SCENARIO_DIR) / (path.string() + ".json");
}

Scenario load_scenario(const std::filesystem::path& path) {
  const auto resolved = resolve_scenario_path(path);
  std::ifstream in(resolved, std::ios::binary);
  if (!in) throw ScenarioError(resolved.string(), {{"", "cannot open scenario file " + resolved.string()}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), resolved.string());
}

}  // namespace cogroute::netsim
