#include "gapdelay/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gapdelay/errors.hpp"

namespace gapdelay {

namespace {

constexpr double kGridTolerance = 1e-6;

// 802.11ax 80 MHz RU plan on 1024 tones: 12 left guards, 498 active, 5 nulls
// around DC, 498 active, 11 right guards.
constexpr std::size_t kTonePlanSize = 1024;
constexpr std::size_t kLeftGuards = 12;
constexpr std::size_t kRightGuards = 11;
constexpr std::size_t kDcNulls = 5;

bool toneplan_active(std::size_t j) {
    const std::size_t k = j % kTonePlanSize;
    const std::size_t dc_lo = kTonePlanSize / 2 - kDcNulls / 2;
    const std::size_t dc_hi = kTonePlanSize / 2 + kDcNulls / 2;
    if (k < kLeftGuards || k >= kTonePlanSize - kRightGuards) return false;
    return k < dc_lo || k > dc_hi;
}

double raised_cosine_edge(std::size_t j, std::size_t count, double delta_f_hz, double width_hz) {
    const double from_lo = (static_cast<double>(j) + 0.5) * delta_f_hz;
    const double from_hi = (static_cast<double>(count - 1 - j) + 0.5) * delta_f_hz;
    const double d = std::min(from_lo, from_hi);
    if (d >= width_hz) return 1.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * d / width_hz));
}

std::size_t tone_count(double width_hz, double delta_f_hz) {
    const double ratio = width_hz / delta_f_hz;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > kGridTolerance * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "band width " << width_hz << " Hz is not a multiple of delta_f " << delta_f_hz
            << " Hz";
        throw InvalidInput(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

FrequencyGrid build_grid(double f_start_hz, double f_stop_hz, double delta_f_hz) {
    if (!(delta_f_hz > 0.0) || !std::isfinite(delta_f_hz)) {
        throw InvalidInput("delta_f must be positive, got " + std::to_string(delta_f_hz));
    }
    if (!(f_stop_hz > f_start_hz)) {
        throw InvalidInput("f_stop must exceed f_start");
    }
    const double span = f_stop_hz - f_start_hz;
    const double ratio = span / delta_f_hz;
    const double steps = std::round(ratio);
    const double residual_hz = span - steps * delta_f_hz;
    if (std::abs(residual_hz) > kGridTolerance * span) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "span " << span << " Hz is not an integer multiple of delta_f " << delta_f_hz
            << " Hz (residual " << residual_hz << " Hz)";
        throw InvalidInput(msg.str());
    }
    return FrequencyGrid{f_start_hz, delta_f_hz, static_cast<std::size_t>(steps) + 1};
}

std::size_t grid_index(const FrequencyGrid& grid, double f_hz) {
    const double pos = (f_hz - grid.f_start_hz) / grid.delta_f_hz;
    const double rounded = std::round(pos);
    if (std::abs(pos - rounded) > kGridTolerance * std::max(1.0, std::abs(pos)) || rounded < 0.0 ||
        rounded > static_cast<double>(grid.n_tones - 1)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "frequency " << f_hz << " Hz is not on the grid";
        throw InvalidInput(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

std::string MaskShaping::name() const {
    switch (preset) {
        case ShapingPreset::flat: return "flat";
        case ShapingPreset::flat_taper: return "flat-taper";
        case ShapingPreset::toneplan_11ax: return "toneplan-11ax";
    }
    return "unknown";
}

MaskShaping MaskShaping::parse(std::string_view name, double taper_width_hz) {
    if (!(taper_width_hz >= 0.0)) throw InvalidInput("taper width must be >= 0");
    if (name == "flat") return {ShapingPreset::flat, taper_width_hz};
    if (name == "flat-taper") return {ShapingPreset::flat_taper, taper_width_hz};
    if (name == "toneplan-11ax") return {ShapingPreset::toneplan_11ax, taper_width_hz};
    throw InvalidInput("unknown shaping preset '" + std::string(name) + "'");
}

PhaseReference parse_phase_reference(std::string_view name) {
    if (name == "aperture-center") return PhaseReference::aperture_center;
    if (name == "absolute") return PhaseReference::absolute;
    throw InvalidInput("unknown phase reference '" + std::string(name) + "'");
}

std::string to_string(PhaseReference ref) {
    return ref == PhaseReference::aperture_center ? "aperture-center" : "absolute";
}

std::vector<double> SpectralMask::subband_weights(std::size_t i) const {
    std::vector<double> out(weights.size(), 0.0);
    const Subband& sb = subbands.at(i);
    for (std::size_t n = sb.first_tone; n <= sb.last_tone; ++n) out[n] = weights[n];
    return out;
}

SpectralMask build_mask(const Scenario& scenario, const MaskOptions& options) {
    if (scenario.bands.empty()) throw InvalidInput("scenario '" + scenario.id + "' has no bands");
    const double lo = scenario.bands.front().lo_hz;
    const double hi = scenario.bands.back().hi_hz;

    SpectralMask mask;
    mask.scenario_id = scenario.id;
    mask.shaping = options.shaping;
    mask.grid = build_grid(lo, hi, options.delta_f_hz);
    mask.weights.assign(mask.grid.n_tones, 0.0);
    mask.reference_hz =
        options.phase_reference == PhaseReference::aperture_center ? 0.5 * (lo + hi) : 0.0;

    const double df = options.delta_f_hz;
    for (const Band& band : scenario.bands) {
        const std::size_t first = grid_index(mask.grid, band.lo_hz);
        const std::size_t count = tone_count(band.width_hz(), df);

        switch (options.shaping.preset) {
            case ShapingPreset::flat:
                for (std::size_t j = 0; j < count; ++j) mask.weights[first + j] = 1.0;
                break;
            case ShapingPreset::flat_taper: {
                const double w = options.shaping.taper_width_hz;
                if (band.width_hz() <= 2.0 * w) {
                    throw InvalidInput("band of " + std::to_string(band.width_hz()) +
                                       " Hz is narrower than two taper edges");
                }
                for (std::size_t j = 0; j < count; ++j) {
                    mask.weights[first + j] = w > 0.0 ? raised_cosine_edge(j, count, df, w) : 1.0;
                }
                break;
            }
            case ShapingPreset::toneplan_11ax:
                if (std::abs(df - kWifiSubcarrierSpacingHz) > 1e-9 * kWifiSubcarrierSpacingHz) {
                    throw InvalidInput("toneplan-11ax requires 78.125 kHz subcarrier spacing");
                }
                if (count % kTonePlanSize != 0) {
                    throw InvalidInput("band of " + std::to_string(band.width_hz()) +
                                       " Hz does not hold whole 80 MHz tone plans");
                }
                for (std::size_t j = 0; j < count; ++j) {
                    mask.weights[first + j] = toneplan_active(j) ? 1.0 : 0.0;
                }
                break;
        }
        mask.subbands.push_back(Subband{band.lo_hz, band.hi_hz, first, first + count - 1});
    }
    return mask;
}

std::vector<std::size_t> used_set(const SpectralMask& mask) {
    std::vector<std::size_t> k;
    for (std::size_t n = 0; n < mask.weights.size(); ++n) {
        if (mask.weights[n] != 0.0) k.push_back(n);
    }
    if (k.empty()) {
        throw InvalidInput("mask '" + mask.scenario_id + "' has no used subcarriers");
    }
    return k;
}

SubbandCenters subband_centers(const SpectralMask& mask) {
    SubbandCenters out;
    for (const Subband& sb : mask.subbands) out.centers_hz.push_back(sb.center_hz());
    if (out.centers_hz.size() == 2) out.spacing_hz = out.centers_hz[1] - out.centers_hz[0];
    return out;
}

ToneSet tone_set(const SpectralMask& mask) {
    ToneSet t;
    t.index = used_set(mask);
    t.reference_hz = mask.reference_hz;
    t.delta_f_ghz = mask.grid.delta_f_hz * 1e-9;
    const double start_offset_hz = mask.grid.f_start_hz - mask.reference_hz;
    t.offset_ghz.reserve(t.size());
    t.weight.reserve(t.size());
    t.power.reserve(t.size());
    t.subband.reserve(t.size());
    std::size_t sb = 0;
    for (std::size_t n : t.index) {
        const double offset_hz = start_offset_hz + static_cast<double>(n) * mask.grid.delta_f_hz;
        t.offset_ghz.push_back(offset_hz * 1e-9);
        const double a = mask.weights[n];
        t.weight.push_back(a);
        t.power.push_back(a * a);
        while (sb + 1 < mask.subbands.size() && !mask.subbands[sb].contains(n)) ++sb;
        t.subband.push_back(sb);
    }
    t.first_offset_ghz = t.offset_ghz.front();
    return t;
}

}  // namespace gapdelay
