#pragma once

// Delay-domain behaviour of a spectral mask: the single-path response g(tau),
// its two-subband decomposition, two-path matched-filter scans, restricted
// peak picking and the normalized leakage curve.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gapdelay/channel.hpp"
#include "gapdelay/spectrum.hpp"

namespace gapdelay {

/// Uniform delay axis start + i * step, i = 0 .. count-1 (seconds).
struct DelayAxis {
    double start_s = 0.0;
    double step_s = 1e-12;
    std::size_t count = 0;

    double at(std::size_t i) const { return start_s + static_cast<double>(i) * step_s; }
    double stop_s() const { return at(count - 1); }
    std::vector<double> values() const;

    /// [start, stop] inclusive with the given step. Throws InvalidInput if
    /// the step is not positive or stop < start.
    static DelayAxis range(double start_s, double stop_s, double step_s);
};

/// Default scan axis: 0 .. 50 ns at 1 ps.
DelayAxis default_delay_axis();

struct DelayScan {
    std::string scenario_id;
    DelayAxis axis;
    std::vector<double> values;
    bool normalized = false;
};

/// g(tau) = sum_{K_s} |a[n]|^2 exp(-j2pi (f[n] - f_ref) tau) at arbitrary delays.
std::vector<cplx> single_path_response_complex(const SpectralMask& mask,
                                               std::span<const double> tau_s);

/// |g(tau)| on the axis, divided by g(0) = sum |a|^2 when `normalize`.
DelayScan single_path_response(const SpectralMask& mask, const DelayAxis& axis,
                               bool normalize = true);

struct SubbandResponse {
    DelayAxis axis;
    std::vector<cplx> g1, g2;  // basebanded G_1, G_2
    double f_c1_hz = 0.0;
    double f_c2_hz = 0.0;
    double reference_hz = 0.0;

    /// exp(-j2pi f_c1 tau) G_1 + exp(-j2pi f_c2 tau) G_2, i.e. g(tau)/g(0).
    std::vector<cplx> recombined() const;
};

/// Requires exactly two subbands.
SubbandResponse subband_decomposition(const SpectralMask& mask, const DelayAxis& axis);

struct PredictedMinima {
    std::vector<double> gap_minima_s;       // (m + 1/2) / delta_fc, m = 0 .. m_max
    std::vector<double> envelope_minima_s;  // k / B_sb, k = 1 .. m_max
};

PredictedMinima predicted_minima(double delta_fc_hz, double subband_width_hz, std::size_t m_max);

/// Noise-free scan T(tau) = |alpha1 g(tau1 - tau) + alpha2 g(tau2 - tau)|,
/// assembled from two shifted copies of g.
DelayScan two_path_scan(const SpectralMask& mask, const TwoPathChannel& channel,
                        const DelayAxis& axis);

/// Observation scan T(tau) = |sum_{K_s} a[n] y[n] exp(+j2pi (f[n] - f_ref) tau)|.
DelayScan two_path_scan(const Observation& observation, const DelayAxis& axis);

struct PeakEstimate {
    double tau_true_s = 0.0;
    double tau_hat_s = 0.0;
    double offset_s = 0.0;
    double window_s = 0.0;
    bool refined = false;
};

/// Grid argmax of the scan inside tau_true +/- window, refined by a 3-point
/// parabola. The window must span at least 5 steps and stay strictly inside
/// the axis.
PeakEstimate restricted_peak(const DelayScan& scan, double tau_true_s, double window_s);

/// Default restricted-search half-width.
inline constexpr double kDefaultPeakWindowS = 1.0e-9;

struct PeakReport {
    std::string scenario_id;
    PeakEstimate first;
    PeakEstimate second;
    bool windows_overlap = false;
};

PeakReport extract_peaks(const DelayScan& scan, const TwoPathChannel& channel,
                         double window_s = kDefaultPeakWindowS);

struct LeakageCurve {
    std::vector<double> delta_tau_s;
    std::vector<double> level;
};

/// l(dtau) = |g(dtau)| / |g(0)| for dtau >= 0.
LeakageCurve leakage(const SpectralMask& mask, std::span<const double> delta_tau_s);

enum class ExtremumKind { maximum, minimum };

/// Strict 3-point local extrema whose topographic prominence is at least
/// `prominence_floor` (same units as `y`). Indices ascending.
std::vector<std::size_t> local_extrema(std::span<const double> y, ExtremumKind kind,
                                       double prominence_floor = 1e-3);

}  // namespace gapdelay
