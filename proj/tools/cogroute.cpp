// cogroute: run blind vs cognitive routing scenarios, validate scenario
// files, and dump per-epoch FCPI predictions.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cogroute/cli.hpp"

int main(int argc, char** argv) {
  using namespace cogroute;

  CLI::App app{"Cognitive routing simulator: HMM-predicted forward channel health vs blind forwarding"};
  app.require_subcommand(1);

  cli::RunConfig config;
  std::string seeds = "1";
  std::string mode = "compare";
  std::string format = "csv";
  std::string scenario = "default";
  auto* run = app.add_subcommand("run", "Run a scenario and write reports");
  run->add_option("--scenario", scenario, "Scenario file, or the name of a bundled scenario")->capture_default_str();
  run->add_option("--epochs", config.epochs, "Epochs to simulate")->capture_default_str();
  run->add_option("--seeds", seeds, "Seeds: 7, 1..10, 1,4,9")->capture_default_str();
  run->add_option("--mode", mode, "blind | cognitive | compare")->capture_default_str();
  run->add_option("--out", config.output_dir, "Output directory")->capture_default_str();
  run->add_option("--format", format, "csv | json | both")->capture_default_str();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario file and list every problem");
  validate->add_option("scenario", validate_path, "Scenario file")->required();

  std::string trace_scenario = "default";
  cogroute::netsim::RouterId trace_router = 0;
  std::optional<cogroute::netsim::RouterId> trace_neighbor;
  std::uint32_t trace_epochs = 100;
  std::uint64_t trace_seed = 1;
  std::optional<std::string> trace_out;
  auto* trace = app.add_subcommand("trace", "Per-epoch predicted FCPI of each forward router");
  trace->add_option("--scenario", trace_scenario, "Scenario file or bundled name")->capture_default_str();
  trace->add_option("--router", trace_router, "Router under consideration")->required();
  trace->add_option("--neighbor", trace_neighbor, "Only this forward router");
  trace->add_option("--epochs", trace_epochs, "Epochs to simulate")->capture_default_str();
  trace->add_option("--seed", trace_seed, "Seed")->capture_default_str();
  trace->add_option("--out", trace_out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    config.scenario_path = scenario;
    try {
      config.seeds = cli::parse_seeds(seeds);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: --seeds: " << e.what() << '\n';
      return 1;
    }
    const auto run_mode = netsim::parse_run_mode(mode);
    const auto report_format = cli::parse_format(format);
    if (!run_mode) {
      std::cerr << "error: --mode must be blind, cognitive or compare\n";
      return 1;
    }
    if (!report_format) {
      std::cerr << "error: --format must be csv, json or both\n";
      return 1;
    }
    config.mode = *run_mode;
    config.format = *report_format;
    return cli::cmd_run(config, std::cout, std::cerr);
  }
  if (*validate) return cli::cmd_validate(validate_path, std::cout, std::cerr);

  std::optional<std::filesystem::path> out_file;
  if (trace_out) out_file = *trace_out;
  return cli::cmd_trace(trace_scenario, trace_router, trace_neighbor, trace_epochs, trace_seed, out_file, std::cout,
                        std::cerr);
}
