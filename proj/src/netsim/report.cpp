#include "cogroute/netsim/report.hpp"

#include <cstdio>
#include <string>

#include "json.hpp"

namespace cogroute::netsim {

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const RunReport> reports) {
  out << kCsvHeader << '\n';
  for (const RunReport& r : reports) {
    out << to_string(r.mode) << ',' << r.seed << ',' << fixed(r.delivery_ratio()) << ',' << fixed(r.mean_delay_ms())
        << ',' << r.total_retransmissions << ',' << r.cognitive_bytes << ',' << r.data_bytes << ','
        << fixed(r.prediction_bit_accuracy()) << '\n';
  }
}

void write_json(std::ostream& out, std::span<const RunReport> reports) {
  nlohmann::ordered_json doc;
  doc["runs"] = nlohmann::ordered_json::array();
  for (const RunReport& r : reports) {
    nlohmann::ordered_json run;
    run["mode"] = to_string(r.mode);
    run["seed"] = r.seed;
    run["epochs"] = r.epochs;
    run["injected"] = r.injected;
    run["delivered"] = r.delivered;
    run["dropped"] = r.dropped;
    run["in_flight"] = r.in_flight;
    run["delivery_ratio"] = r.delivery_ratio();
    run["mean_delay_ms"] = r.mean_delay_ms();
    run["retransmissions"] = r.total_retransmissions;
    run["cognitive_bytes"] = r.cognitive_bytes;
    run["data_bytes"] = r.data_bytes;
    run["prediction_bit_accuracy"] = r.prediction_bit_accuracy();

    auto& series = run["series"];
    for (const char* key : {"epoch", "injected", "delivered", "dropped", "retransmissions", "cognitive_bytes",
                            "data_bytes"}) {
      series[key] = nlohmann::ordered_json::array();
    }
    for (const EpochSample& s : r.series) {
      series["epoch"].push_back(s.epoch);
      series["injected"].push_back(s.injected);
      series["delivered"].push_back(s.delivered);
      series["dropped"].push_back(s.dropped);
      series["retransmissions"].push_back(s.retransmissions);
      series["cognitive_bytes"].push_back(s.cognitive_bytes);
      series["data_bytes"].push_back(s.data_bytes);
    }
    doc["runs"].push_back(std::move(run));
  }
  out << doc.dump(2) << '\n';
}

void write_trace_csv(std::ostream& out, const PredictionTrace& trace) {
  const std::size_t epochs = trace.values.empty() ? 0 : trace.values.front().size();
  out << "router";
  for (std::size_t t = 1; t <= epochs; ++t) out << ",t" << t;
  out << '\n';
  for (std::size_t i = 0; i < trace.neighbors.size(); ++i) {
    out << 'R' << trace.neighbors[i];
    for (std::uint8_t v : trace.values[i]) out << ',' << static_cast<int>(v);
    out << '\n';
  }
}

}  // namespace cogroute::netsim
