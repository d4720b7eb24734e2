#include "cogroute/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cogroute/netsim/report.hpp"
#include "cogroute/netsim/scenario.hpp"

namespace cogroute::cli {

namespace {

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("bad seed '" + std::string(text) + "'");
  }
  return v;
}

// Loads the scenario or reports why it failed; exit code 2 for scenario errors.
std::optional<netsim::Scenario> load(const std::filesystem::path& path, std::ostream& err) {
  try {
    return netsim::load_scenario(path);
  } catch (const netsim::ScenarioError& e) {
    err << "error: " << e.origin() << '\n';
    for (const auto& issue : e.issues()) err << "  " << issue.location << ": " << issue.message << '\n';
    return std::nullopt;
  }
}

std::string ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(std::string_view spec) {
  std::vector<std::uint64_t> seeds;
  while (!spec.empty()) {
    const std::size_t comma = spec.find(',');
    const std::string_view part = spec.substr(0, comma);
    const std::size_t dots = part.find("..");
    if (dots == std::string_view::npos) {
      seeds.push_back(parse_u64(part));
    } else {
      const std::uint64_t lo = parse_u64(part.substr(0, dots));
      const std::uint64_t hi = parse_u64(part.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("empty seed range '" + std::string(part) + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  return seeds;
}

std::optional<ReportFormat> parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  if (text == "both") return ReportFormat::Both;
  return std::nullopt;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto scenario = load(config.scenario_path, err);
  if (!scenario) return 2;

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    err << "error: cannot create output directory " << config.output_dir.string() << ": " << ec.message() << '\n';
    return 3;
  }

  std::vector<netsim::RunReport> reports;
  for (std::uint64_t seed : config.seeds) {
    const auto runs = netsim::run(*scenario, config.epochs, seed, config.mode);
    out << "seed " << seed;
    for (const auto& r : runs) {
      out << " | " << netsim::to_string(r.mode) << " delivery=" << ratio(r.delivery_ratio())
          << " retx=" << r.total_retransmissions << " delay_ms=" << ratio(r.mean_delay_ms());
    }
    out << '\n';
    reports.insert(reports.end(), runs.begin(), runs.end());
  }
  // Rows grouped by mode, then seed.
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return a.mode < b.mode; });

  auto write = [&](const char* name, auto writer) {
    const auto path = config.output_dir / name;
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (file) writer(file, std::span<const netsim::RunReport>(reports));
    if (!file) {
      err << "error: cannot write " << path.string() << '\n';
      return false;
    }
    out << "wrote " << path.string() << '\n';
    return true;
  };
  bool ok = true;
  if (config.format != ReportFormat::Json) ok = write("report.csv", netsim::write_csv) && ok;
  if (config.format != ReportFormat::Csv) ok = write("report.json", netsim::write_json) && ok;
  return ok ? 0 : 3;
}

int cmd_validate(const std::filesystem::path& scenario_path, std::ostream& out, std::ostream& err) {
  const auto scenario = load(scenario_path, err);
  if (!scenario) return 2;
  out << "OK " << scenario->name << ": " << scenario->routers.size() << " routers, " << scenario->channels.size()
      << " channels, " << scenario->candidates.size() << " candidate tables, " << scenario->flows.size()
      << " flows\n";
  return 0;
}

int cmd_trace(const std::filesystem::path& scenario_path,
              netsim::RouterId router,
              std::optional<netsim::RouterId> neighbor,
              std::uint32_t epochs,
              std::uint64_t seed,
              const std::optional<std::filesystem::path>& out_file,
              std::ostream& out,
              std::ostream& err) {
  const auto scenario = load(scenario_path, err);
  if (!scenario) return 2;
  netsim::PredictionTrace trace;
  try {
    trace = netsim::trace_predictions(*scenario, router, neighbor, epochs, seed);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (!out_file) {
    netsim::write_trace_csv(out, trace);
    return 0;
  }
  std::ofstream file(*out_file, std::ios::binary | std::ios::trunc);
  if (file) netsim::write_trace_csv(file, trace);
  if (!file) {
    err << "error: cannot write " << out_file->string() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace cogroute::cli
