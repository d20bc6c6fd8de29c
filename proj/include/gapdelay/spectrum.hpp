#pragma once

// Frequency grids, Wi-Fi scenario catalog and spectral masks.
//
// External quantities are in Hz. Every band [f_lo, f_hi] occupies the tones
// f_lo <= f < f_hi of the global grid, so a 160 MHz channel at 78.125 kHz
// spacing holds 2048 tones and two adjacent channels never share a tone.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gapdelay {

inline constexpr double kWifiSubcarrierSpacingHz = 78'125.0;

/// Uniform global grid f[n] = f_start + n * delta_f, n = 0 .. n_tones-1.
struct FrequencyGrid {
    double f_start_hz = 0.0;
    double delta_f_hz = kWifiSubcarrierSpacingHz;
    std::size_t n_tones = 1;

    double frequency_hz(std::size_t n) const {
        return f_start_hz + static_cast<double>(n) * delta_f_hz;
    }
    double f_stop_hz() const { return frequency_hz(n_tones - 1); }
    /// B_tot = (N_f - 1) * delta_f.
    double aperture_hz() const { return static_cast<double>(n_tones - 1) * delta_f_hz; }
};

/// Builds the grid spanning [f_start, f_stop]. The span must be an integer
/// multiple of delta_f (1e-6 relative tolerance); otherwise InvalidInput
/// reports the residual.
FrequencyGrid build_grid(double f_start_hz, double f_stop_hz, double delta_f_hz);

/// Index of `f_hz` on the grid; throws InvalidInput if it is off-grid.
std::size_t grid_index(const FrequencyGrid& grid, double f_hz);

struct Band {
    double lo_hz = 0.0;
    double hi_hz = 0.0;
    double width_hz() const { return hi_hz - lo_hz; }
    double center_hz() const { return 0.5 * (lo_hz + hi_hz); }
};

struct Scenario {
    std::string id;
    std::vector<Band> bands;  // sorted, non-overlapping
    /// Set when this scenario is the contiguous reference of another one.
    std::optional<std::string> reference_of;

    bool is_contiguous_reference() const { return reference_of.has_value(); }
    double aperture_hz() const;
    /// Total unoccupied width between consecutive bands.
    double gap_hz() const;
};

/// Validates and builds a user-defined scenario.
Scenario make_scenario(std::string id, std::vector<Band> bands);

/// The six multiband scenarios (A1..B3) followed by the contiguous references
/// A2*, A3*, B2*, B3*.
const std::vector<Scenario>& scenario_catalog();

/// Catalog lookup by id ("A2", "B3*"); nullopt if unknown.
std::optional<Scenario> find_scenario(std::string_view id);

/// Same as find_scenario but throws InvalidInput naming the id.
Scenario require_scenario(std::string_view id);

/// Scenario ids of group "A" or "B", gapped scenarios each followed by their
/// reference, e.g. {A1, A2, A2*, A3, A3*}.
std::vector<std::string> group_variants(std::string_view group);

struct ContiguousReference {
    Scenario scenario;
    bool identity = false;  // input was already contiguous
};

/// One band over [min f_lo, max f_hi]. Already-contiguous input is returned
/// unchanged with `identity` set.
ContiguousReference contiguous_reference(const Scenario& scenario);

enum class ShapingPreset { flat, flat_taper, toneplan_11ax };

struct MaskShaping {
    ShapingPreset preset = ShapingPreset::flat_taper;
    double taper_width_hz = 2.0e6;  // per band edge, flat-taper only

    std::string name() const;
    static MaskShaping parse(std::string_view name, double taper_width_hz = 2.0e6);
};

/// Where complex path gains are phase-referenced. Phases are evaluated as
/// exp(-j2pi (f - f_ref) tau).
enum class PhaseReference { aperture_center, absolute };

PhaseReference parse_phase_reference(std::string_view name);
std::string to_string(PhaseReference ref);

struct Subband {
    double f_lo_hz = 0.0;
    double f_hi_hz = 0.0;
    std::size_t first_tone = 0;  // inclusive
    std::size_t last_tone = 0;   // inclusive

    double center_hz() const { return 0.5 * (f_lo_hz + f_hi_hz); }
    double width_hz() const { return f_hi_hz - f_lo_hz; }
    bool contains(std::size_t n) const { return n >= first_tone && n <= last_tone; }
};

struct SpectralMask {
    std::string scenario_id;
    FrequencyGrid grid;
    std::vector<double> weights;  // a[n] >= 0, length n_tones
    std::vector<Subband> subbands;
    MaskShaping shaping;
    double reference_hz = 0.0;

    /// a_i[n]: weights restricted to subband i.
    std::vector<double> subband_weights(std::size_t i) const;
};

struct MaskOptions {
    MaskShaping shaping;
    double delta_f_hz = kWifiSubcarrierSpacingHz;
    PhaseReference phase_reference = PhaseReference::aperture_center;
};

SpectralMask build_mask(const Scenario& scenario, const MaskOptions& options = {});

/// Ascending K_s = { n : a[n] != 0 }. Throws InvalidInput if empty.
std::vector<std::size_t> used_set(const SpectralMask& mask);

struct SubbandCenters {
    std::vector<double> centers_hz;
    std::optional<double> spacing_hz;  // f_c2 - f_c1 for exactly two subbands
};

SubbandCenters subband_centers(const SpectralMask& mask);

/// Compact view of the used tones for the numerical kernels: frequencies are
/// offsets from the mask's phase reference, in GHz.
struct ToneSet {
    std::vector<std::size_t> index;
    std::vector<double> offset_ghz;
    std::vector<double> weight;        // a[n]
    std::vector<double> power;         // |a[n]|^2
    std::vector<std::size_t> subband;  // owning subband per tone
    double reference_hz = 0.0;
    double delta_f_ghz = 0.0;
    double first_offset_ghz = 0.0;     // offset of index.front()

    std::size_t size() const { return index.size(); }
};

ToneSet tone_set(const SpectralMask& mask);

}  // namespace gapdelay
