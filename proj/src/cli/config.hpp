#pragma once

// Run configuration shared by every subcommand. A config file is JSON with
// the same field names as to_json() emits; command-line flags override it.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapdelay/crlb.hpp"
#include "gapdelay/delay_response.hpp"
#include "gapdelay/spectrum.hpp"

namespace gapdelay::cli {

struct LinearGridSpec {
    double start = -10.0;
    double stop = 40.0;
    double step = 2.0;
};

struct SeparationGridSpec {
    double min_ns = 0.1;
    double max_ns = 50.0;
    std::size_t points = 400;
    std::string spacing = "log";  // "log" | "linear"
};

struct DelayAxisSpec {
    double start_ns = 0.0;
    double stop_ns = 50.0;
    double step_ns = 0.001;
};

struct RunConfig {
    std::vector<std::string> scenarios;  // catalog ids; empty = all of `group`
    std::string group;                   // "A", "B" or empty
    std::string custom_id = "custom";
    std::vector<Band> custom_bands_hz;

    std::string preset = "flat-taper";
    double taper_width_hz = 2.0e6;
    double delta_f_hz = kWifiSubcarrierSpacingHz;
    std::string phase_reference = "aperture-center";

    // Channel point. Unset delays default per group: A -> (5, 15) ns, B -> (5, 10) ns.
    std::optional<double> tau1_ns;
    std::optional<double> tau2_ns;
    double alpha1_re = 1.0;
    double alpha1_im = 0.0;
    double alpha2_re = reference_channel(0.0, 0.0).alpha2.real();
    double alpha2_im = reference_channel(0.0, 0.0).alpha2.imag();

    std::string sweep = "snr";  // crlb: "snr" | "dtau"
    double snr_db = 20.0;
    std::vector<double> dtau_ns = {1.0};  // separations for SNR sweeps
    LinearGridSpec snr_grid;
    SeparationGridSpec dtau_grid;
    DelayAxisSpec delay_axis;
    double peak_window_ns = kDefaultPeakWindowS * 1e9;

    bool noise = false;
    std::uint64_t seed = 1;
    bool recombination_check = false;

    std::filesystem::path output_dir;
    bool no_meta = false;
    bool json = false;
    unsigned workers = 0;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Default output directory: $GAPDELAY_OUTPUT_DIR, else ./gapdelay-out.
std::filesystem::path default_output_dir();

/// Throws InvalidInput on the first violated precondition.
void validate(const RunConfig& config);

/// Scenarios selected by the config, in the order given (custom bands last).
std::vector<Scenario> selected_scenarios(const RunConfig& config);

MaskOptions mask_options(const RunConfig& config);

/// Channel point for a scenario, filling unset delays from its group.
TwoPathChannel channel_for(const RunConfig& config, const Scenario& scenario);

std::vector<double> snr_grid(const RunConfig& config);
std::vector<double> separation_grid_s(const RunConfig& config);
DelayAxis delay_axis(const RunConfig& config);

}  // namespace gapdelay::cli
