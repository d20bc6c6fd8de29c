#pragma once

// Subcommand implementations. Each writes its files under
// config.output_dir and a short listing to `out`; warnings go to `err`.
// Validation problems throw InvalidInput, numerical ones NumericalError.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"

namespace gapdelay::cli {

struct CommandStreams {
    std::ostream& out;
    std::ostream& err;
};

nlohmann::json scenario_json(const Scenario& scenario);
nlohmann::json peak_report_json(const PeakReport& report);

/// Ids of the catalog filtered by config.scenarios (all ten when empty).
void cmd_scenarios(const RunConfig& config, bool as_json, CommandStreams io);
void cmd_mask(const RunConfig& config, CommandStreams io);
void cmd_crlb(const RunConfig& config, CommandStreams io);
void cmd_response(const RunConfig& config, CommandStreams io);
void cmd_scan(const RunConfig& config, CommandStreams io);
void cmd_leakage(const RunConfig& config, CommandStreams io);
void cmd_table2(const RunConfig& config, CommandStreams io);

/// Every table and figure family into config.output_dir, plus config.json.
void cmd_reproduce_all(const RunConfig& config, CommandStreams io);

/// Seed used for one scenario's noisy observation: stable in the id.
std::uint64_t scenario_seed(std::uint64_t base_seed, const std::string& scenario_id);

}  // namespace gapdelay::cli
