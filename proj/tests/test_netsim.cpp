#include <algorithm>
#include <string>

#include "cogroute/netsim/routing.hpp"
#include "cogroute/netsim/scenario.hpp"
#include "cogroute/netsim/world.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cogroute;
using namespace cogroute::netsim;
using nlohmann::json;

namespace {

json dynamics(double good_loss) {
  return {{"transition", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}},
          {"states",
           {{{"name", "good"}, {"loss", good_loss}, {"bandwidth", 1.0}},
            {{"name", "degraded"}, {"loss", 0.3}, {"bandwidth", 0.6}},
            {{"name", "bad"}, {"loss", 1.0}, {"bandwidth", 0.0}}}}};
}

json channel(int from, int index, int to, double loss = 0.0, double delay = 1.0) {
  return {{"from", from}, {"index", index}, {"to", to}, {"base_delay_ms", delay}, {"dynamics", dynamics(loss)}};
}

// 1 reaches 4 through 2 or 3; both directions exist so every router emits.
json diamond(double loss_via_2 = 0.0, double loss_via_3 = 0.0) {
  json doc;
  doc["name"] = "diamond";
  doc["routers"] = {1, 2, 3, 4};
  doc["channels"] = {channel(1, 1, 2, 0.0, 1.0), channel(1, 2, 3, 0.0, 2.0), channel(2, 1, 4, loss_via_2),
                     channel(3, 1, 4, loss_via_3), channel(2, 2, 1), channel(3, 2, 1),
                     channel(4, 1, 2), channel(4, 2, 3)};
  doc["candidates"] = {{{"router", 1}, {"destination", 4},
                        {"next_hops", {{{"neighbor", 2}, {"channel", 1}}, {{"neighbor", 3}, {"channel", 1}}}}}};
  doc["traffic"] = {{"flows", {{{"source", 1}, {"destination", 4}, {"rate", 2.0}}}}};
  doc["params"] = {{"cognitive_interval", 1}, {"retrain_every", 5}};
  return doc;
}

Scenario parse(const json& doc) { return parse_scenario(doc.dump(), "test"); }

std::vector<Issue> issues_of(const json& doc) {
  try {
    parse(doc);
  } catch (const ScenarioError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<Issue>& issues, const std::string& text) {
  return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) {
    return i.message.find(text) != std::string::npos || i.location.find(text) != std::string::npos;
  });
}

RunReport run_for(const Scenario& s, Mode mode, std::uint32_t epochs, std::uint64_t seed) {
  return run_mode(s, epochs, seed, mode);
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal scenario loads") {
  const Scenario s = load_scenario("minimal");
  CHECK(s.routers.size() == 2);
  CHECK(s.channels.size() == 1);
  CHECK(s.candidates_for(1, 2).size() == 1);
  CHECK(s.candidates_for(2, 1).empty());
  CHECK(s.channels[0].label() == "R1.C1->R2");
}

TEST_CASE("bundled default scenario has full hubs") {
  const Scenario s = load_scenario("default");
  CHECK(s.routers.size() == 20);
  std::map<RouterId, int> out_degree;
  for (const auto& c : s.channels) ++out_degree[c.from];
  int hubs = 0;
  for (const auto& [id, n] : out_degree) hubs += n == 8;
  CHECK(hubs >= 4);
  CHECK(s.params.retry_limit == 2);
  CHECK(s.params.ttl == 16);
  CHECK(s.params.max_candidates == 3);
}

TEST_CASE("non-stochastic transition row names the channel") {
  json doc = diamond();
  doc["channels"][2]["dynamics"]["transition"][0] = {0.5, 0.3, 0.1};
  const auto issues = issues_of(doc);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].message.find("R2.C1->R4") != std::string::npos);
  CHECK(issues[0].location == "/channels/2/dynamics/transition/0");
}

TEST_CASE("every problem is reported") {
  json doc = diamond();
  doc["channels"][0]["dynamics"]["transition"][1] = {0.2, 0.2, 0.2};
  doc["channels"][3]["dynamics"]["transition"][2] = {0.9, 0.0, 0.0};
  doc["channels"][4]["to"] = 99;
  doc["channels"][5]["index"] = 1;  // R3 already has C1
  doc["bogus"] = true;
  const auto issues = issues_of(doc);
  CHECK(issues.size() == 5);
  CHECK(mentions(issues, "R1.C1->R2"));
  CHECK(mentions(issues, "R3.C1->R4"));
  CHECK(mentions(issues, "unknown router id 99"));
  CHECK(mentions(issues, "duplicate channel index 1"));
  CHECK(mentions(issues, "/bogus"));
}

TEST_CASE("candidate references are checked") {
  json doc = diamond();
  doc["candidates"][0]["next_hops"][0]["channel"] = 5;
  doc["candidates"][0]["next_hops"][1]["neighbor"] = 4;
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "has no channel 5"));
  CHECK(mentions(issues, "no channel to 4"));

  json too_many = diamond();
  too_many["params"]["max_candidates"] = 1;
  CHECK(mentions(issues_of(too_many), "exceed max_candidates"));
}

TEST_CASE("syntax errors carry a line number") {
  try {
    parse_scenario("{\n  \"routers\": [1,\n  2,,\n]}", "broken.json");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].location == "line 3");
    CHECK(e.origin() == "broken.json");
  }
}

TEST_CASE("missing file names the path") {
  try {
    load_scenario("/nonexistent/dir/x.json");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/x.json") != std::string::npos);
  }
}

TEST_CASE("candidate tables are sorted by link cost") {
  json doc = diamond();
  doc["candidates"][0]["next_hops"] = {{{"neighbor", 3}, {"channel", 1}}, {{"neighbor", 2}, {"channel", 1}}};
  const Scenario s = parse(doc);
  CHECK(s.candidates_for(1, 4) == std::vector<Candidate>{{2, 1}, {3, 1}});
}

}

TEST_SUITE("routing") {

TEST_CASE("retry then advance") {
  const std::vector<Candidate> order{{2, 1}, {3, 1}};
  SUBCASE("healthy first candidate") {
    DataPacket p;
    const auto out = forward_with_retries(order, p, 2, [](const Candidate&) { return true; });
    CHECK(out.attempts.size() == 1);
    CHECK(out.retransmissions() == 0);
    CHECK(out.used == Candidate{2, 1});
  }
  SUBCASE("dead first candidate") {
    DataPacket p;
    const auto out = forward_with_retries(order, p, 2, [](const Candidate& c) { return c.neighbor == 3; });
    REQUIRE(out.attempts.size() == 4);
    for (int i = 0; i < 3; ++i) {
      CHECK(out.attempts[i].via == Candidate{2, 1});
      CHECK_FALSE(out.attempts[i].success);
    }
    CHECK(out.attempts[3].success);
    CHECK(out.used == Candidate{3, 1});
    CHECK(p.retransmissions == 2);
  }
  SUBCASE("budget is per packet") {
    DataPacket p;
    p.retransmissions = 2;
    const auto out = forward_with_retries(order, p, 2, [](const Candidate&) { return false; });
    CHECK(out.attempts.size() == 2);
    CHECK(out.dropped());
    CHECK(p.retransmissions == 2);
  }
  SUBCASE("no candidates") {
    DataPacket p;
    const auto out = forward_with_retries({}, p, 2, [](const Candidate&) { return true; });
    CHECK(out.dropped());
    CHECK(out.attempts.empty());
  }
}

TEST_CASE("route_cognitive") {
  cognition::CognitiveDomain domain(5, {});
  const std::vector<Candidate> table{{3, 3}, {2, 5}};
  const std::map<RouterId, double> costs{{3, 1.0}, {2, 2.0}};
  CHECK(route_cognitive(domain, table, costs) == route_blind(table));

  for (std::uint32_t e = 0; e < 20; ++e) {
    domain.receive({1, 3, e, fcpi::Fcpi(153)});
    domain.receive({1, 2, e, fcpi::Fcpi(254)});
  }
  domain.retrain_all();
  CHECK(route_cognitive(domain, table, costs).front() == Candidate{2, 5});

  const std::vector<Candidate> lone{{3, 3}};
  CHECK(route_cognitive(domain, lone, costs) == lone);
}

}

TEST_SUITE("world") {

TEST_CASE("epochs = 0 gives an empty report") {
  const auto r = run_for(parse(diamond()), Mode::Cognitive, 0, 1);
  CHECK(r.injected == 0);
  CHECK(r.delivered == 0);
  CHECK(r.cognitive_bytes == 0);
  CHECK(r.data_bytes == 0);
  CHECK(r.series.empty());
  CHECK(r.delivery_ratio() == 0.0);
}

TEST_CASE("zero traffic counts only cognitive bytes") {
  json doc = diamond();
  doc["traffic"]["flows"][0]["rate"] = 0.0;
  const auto r = run_for(parse(doc), Mode::Cognitive, 1, 1);
  CHECK(r.data_bytes == 0);
  CHECK(r.cognitive_bytes == 8 * 8);  // one packet per directed channel
  CHECK(run_for(parse(doc), Mode::Blind, 1, 1).cognitive_bytes == 0);
}

TEST_CASE("total loss delivers nothing") {
  json doc = diamond(1.0, 1.0);
  doc["channels"][0]["dynamics"] = dynamics(1.0);
  doc["channels"][1]["dynamics"] = dynamics(1.0);
  for (Mode m : {Mode::Blind, Mode::Cognitive}) {
    const auto r = run_for(parse(doc), m, 50, 3);
    CHECK(r.injected > 0);
    CHECK(r.delivered == 0);
    CHECK(r.delivery_ratio() == 0.0);
  }
}

TEST_CASE("minimal scenario delivers everything") {
  const auto r = run_for(load_scenario("minimal"), Mode::Blind, 20, 1);
  CHECK(r.injected > 0);
  CHECK(r.delivered + r.in_flight == r.injected);
  CHECK(r.total_retransmissions == 0);
}

TEST_CASE("flows without a table are dropped") {
  json doc = diamond();
  doc["traffic"]["flows"] = {{{"source", 2}, {"destination", 3}, {"rate", 1.0}}};
  const auto r = run_for(parse(doc), Mode::Blind, 20, 1);
  CHECK(r.injected > 0);
  CHECK(r.dropped + r.in_flight == r.injected);
  CHECK(r.delivered == 0);
}

TEST_CASE("conservation and bounds on the default scenario") {
  const Scenario s = load_scenario("default");
  for (Mode m : {Mode::Blind, Mode::Cognitive}) {
    World w(s, m, 4, {true, false});
    for (int e = 0; e < 120; ++e) w.step_epoch();
    const auto r = w.report();
    CHECK(r.injected == r.delivered + r.dropped + r.in_flight);
    CHECK(r.delivery_ratio() >= 0.0);
    CHECK(r.delivery_ratio() <= 1.0);
    for (const auto& d : w.decisions()) {
      std::size_t same_link = 0;
      for (std::size_t i = 1; i < d.attempts.size(); ++i) same_link += d.attempts[i].via == d.attempts[i - 1].via;
      CHECK(same_link <= static_cast<std::size_t>(s.params.retry_limit));
    }
  }
}

TEST_CASE("the dead path is avoided once learned") {
  const Scenario s = parse(diamond(1.0, 0.0));
  const auto blind = run_for(s, Mode::Blind, 200, 2);
  const auto cog = run_for(s, Mode::Cognitive, 200, 2);
  CHECK(cog.total_retransmissions < blind.total_retransmissions / 2);
  CHECK(cog.delivery_ratio() >= blind.delivery_ratio());
}

TEST_CASE("runs are deterministic") {
  const Scenario s = load_scenario("default");
  const auto a = run(s, 60, 9, RunMode::Compare);
  const auto b = run(s, 60, 9, RunMode::Compare);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a[i].delivered == b[i].delivered);
    CHECK(a[i].total_retransmissions == b[i].total_retransmissions);
    CHECK(a[i].total_delay_ms == b[i].total_delay_ms);
    CHECK(a[i].prediction_hits == b[i].prediction_hits);
  }
  CHECK(a[0].mode == Mode::Blind);
  CHECK(a[1].mode == Mode::Cognitive);
}

TEST_CASE("both modes see the same ground truth and demand") {
  const Scenario s = load_scenario("default");
  World blind(s, Mode::Blind, 5, {false, true});
  World cog(s, Mode::Cognitive, 5, {false, true});
  for (int e = 0; e < 100; ++e) {
    blind.step_epoch();
    cog.step_epoch();
  }
  CHECK(blind.ground_truth() == cog.ground_truth());
  CHECK(blind.report().injected == cog.report().injected);
}

TEST_CASE("disabled dissemination reproduces blind decisions") {
  Scenario s = load_scenario("five_router");
  s.params.cognitive_interval = 0;
  World blind(s, Mode::Blind, 3, {true, false});
  World cog(s, Mode::Cognitive, 3, {true, false});
  for (int e = 0; e < 150; ++e) {
    blind.step_epoch();
    cog.step_epoch();
  }
  CHECK(!blind.decisions().empty());
  CHECK(blind.decisions() == cog.decisions());
  CHECK(cog.report().cognitive_bytes == 0);
}

TEST_CASE("a neighbor is known only through the packets it sends") {
  const Scenario s = load_scenario("five_router");
  const RouterId self = 1;
  const RouterId neighbor = 2;
  World world(s, Mode::Cognitive, 8);
  const auto* domain = world.cognitive_domain(self);
  REQUIRE(domain != nullptr);

  // Replay only the neighbor's own FCPI stream into a fresh learner.
  cognition::CognitiveDomain replica(self, domain->params());
  const std::uint32_t interval = s.params.cognitive_interval;
  for (std::uint32_t e = 0; e < 400; ++e) {
    world.step_epoch();
    if (e % interval != 0) continue;
    const std::uint32_t round = e / interval;
    replica.receive({1, neighbor, round, world.measured_fcpi(neighbor)});
    if (round > 0 && round % s.params.retrain_every == 0) replica.retrain_all();
    CHECK(replica.prediction(neighbor) == domain->prediction(neighbor));
  }
  CHECK(domain->store().at(neighbor).models[0].has_value());
}

TEST_CASE("trace_predictions") {
  const Scenario s = load_scenario("default");
  const auto t = trace_predictions(s, 5, std::nullopt, 3, 1);
  CHECK(t.neighbors == std::vector<RouterId>{1, 2});
  REQUIRE(t.values.size() == 2);
  CHECK(t.values[0].size() == 3);
  CHECK_THROWS_AS(trace_predictions(s, 5, RouterId{6}, 3, 1), std::invalid_argument);
}

}
