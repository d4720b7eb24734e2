#pragma once

#include <ostream>
#include <span>
#include <string_view>

#include "cogroute/netsim/world.hpp"

namespace cogroute::netsim {

inline constexpr std::string_view kCsvHeader =
    "mode,seed,delivery_ratio,mean_delay_ms,retransmissions,cognitive_bytes,data_bytes,prediction_bit_accuracy";

/// Header plus one row per report, in the order given.
void write_csv(std::ostream& out, std::span<const RunReport> reports);

/// Summary fields plus per-epoch series for every report.
void write_json(std::ostream& out, std::span<const RunReport> reports);

/// `router,t1,t2,...` then one row per forward router.
void write_trace_csv(std::ostream& out, const PredictionTrace& trace);

}  // namespace cogroute::netsim
