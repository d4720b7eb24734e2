#pragma once

// Command implementations behind the `cogroute` executable, kept separate
// from argument parsing so they can be driven from tests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cogroute/netsim/world.hpp"

namespace cogroute::cli {

enum class ReportFormat { Csv, Json, Both };

struct RunConfig {
  std::filesystem::path scenario_path = "default";
  std::uint32_t epochs = 500;
  std::vector<std::uint64_t> seeds{1};
  netsim::RunMode mode = netsim::RunMode::Compare;
  std::filesystem::path output_dir = ".";
  ReportFormat format = ReportFormat::Csv;
};

/// "7", "1..10", "1,4,9" or mixes like "1..3,8". Throws std::invalid_argument.
std::vector<std::uint64_t> parse_seeds(std::string_view spec);
std::optional<ReportFormat> parse_format(std::string_view text);

/// Writes report.csv and/or report.json into the output directory.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Prints "OK" or every validation problem.
int cmd_validate(const std::filesystem::path& scenario_path, std::ostream& out, std::ostream& err);

/// Predicted FCPI per forward router per epoch, as CSV, to `out_file` or `out`.
int cmd_trace(const std::filesystem::path& scenario_path,
              netsim::RouterId router,
              std::optional<netsim::RouterId> neighbor,
              std::uint32_t epochs,
              std::uint64_t seed,
              const std::optional<std::filesystem::path>& out_file,
              std::ostream& out,
              std::ostream& err);

}  // namespace cogroute::cli
