#include "gapdelay/delay_response.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gapdelay/errors.hpp"
#include "gapdelay/parallel.hpp"

namespace gapdelay {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sum_k c_k exp(-j2pi (f_k - shift) tau) for tones on a uniform grid,
// evaluated by Horner's rule in r = exp(-j2pi delta_f tau).
class UniformToneSum {
public:
    UniformToneSum(const ToneSet& tones, std::span<const cplx> coeff, double shift_ghz = 0.0)
        : step_ghz_(tones.delta_f_ghz) {
        std::size_t lo = 0;
        std::size_t hi = coeff.size();
        while (lo < hi && coeff[lo] == cplx{}) ++lo;
        while (hi > lo && coeff[hi - 1] == cplx{}) --hi;
        if (lo == hi) return;
        const std::size_t first = tones.index[lo];
        dense_.assign(tones.index[hi - 1] - first + 1, cplx{});
        for (std::size_t k = lo; k < hi; ++k) dense_[tones.index[k] - first] += coeff[k];
        base_ghz_ = tones.offset_ghz[lo] - shift_ghz;
    }

    cplx operator()(double tau_ns) const {
        if (dense_.empty()) return {};
        const cplx r = std::polar(1.0, -kTwoPi * step_ghz_ * tau_ns);
        cplx acc = dense_.back();
        for (std::size_t m = dense_.size() - 1; m-- > 0;) acc = acc * r + dense_[m];
        return std::polar(1.0, -kTwoPi * base_ghz_ * tau_ns) * acc;
    }

private:
    std::vector<cplx> dense_;
    double base_ghz_ = 0.0;
    double step_ghz_ = 0.0;
};

std::vector<cplx> power_coefficients(const ToneSet& tones) {
    return std::vector<cplx>(tones.power.begin(), tones.power.end());
}

template <typename Fn>
std::vector<cplx> evaluate(std::size_t count, Fn&& at) {
    std::vector<cplx> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = at(i); });
    return out;
}

}  // namespace

std::vector<double> DelayAxis::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = at(i);
    return v;
}

DelayAxis DelayAxis::range(double start_s, double stop_s, double step_s) {
    if (!(step_s > 0.0) || !(stop_s >= start_s) || !std::isfinite(stop_s)) {
        throw InvalidInput("delay axis needs step > 0 and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop_s - start_s) / step_s + 1e-6)) + 1;
    return DelayAxis{start_s, step_s, n};
}

DelayAxis default_delay_axis() { return DelayAxis::range(0.0, 50e-9, 1e-12); }

std::vector<cplx> single_path_response_complex(const SpectralMask& mask,
                                               std::span<const double> tau_s) {
    const ToneSet tones = tone_set(mask);
    const UniformToneSum g(tones, power_coefficients(tones));
    return evaluate(tau_s.size(), [&](std::size_t i) { return g(tau_s[i] * 1e9); });
}

DelayScan single_path_response(const SpectralMask& mask, const DelayAxis& axis, bool normalize) {
    const ToneSet tones = tone_set(mask);
    const UniformToneSum g(tones, power_coefficients(tones));
    const double peak = normalize ? std::abs(g(0.0)) : 1.0;
    DelayScan scan{mask.scenario_id, axis, std::vector<double>(axis.count), normalize};
    parallel_for(axis.count,
                 [&](std::size_t i) { scan.values[i] = std::abs(g(axis.at(i) * 1e9)) / peak; });
    return scan;
}

std::vector<cplx> SubbandResponse::recombined() const {
    std::vector<cplx> out(axis.count);
    const double c1 = (f_c1_hz - reference_hz) * 1e-9;
    const double c2 = (f_c2_hz - reference_hz) * 1e-9;
    for (std::size_t i = 0; i < axis.count; ++i) {
        const double tau_ns = axis.at(i) * 1e9;
        out[i] = std::polar(1.0, -kTwoPi * c1 * tau_ns) * g1[i] +
                 std::polar(1.0, -kTwoPi * c2 * tau_ns) * g2[i];
    }
    return out;
}

SubbandResponse subband_decomposition(const SpectralMask& mask, const DelayAxis& axis) {
    if (mask.subbands.size() != 2) {
        throw InvalidInput("subband decomposition needs exactly two subbands, mask '" +
                           mask.scenario_id + "' has " + std::to_string(mask.subbands.size()));
    }
    const ToneSet tones = tone_set(mask);
    double total = 0.0;
    for (double p : tones.power) total += p;

    SubbandResponse out;
    out.axis = axis;
    out.reference_hz = mask.reference_hz;
    out.f_c1_hz = mask.subbands[0].center_hz();
    out.f_c2_hz = mask.subbands[1].center_hz();

    for (std::size_t sb = 0; sb < 2; ++sb) {
        std::vector<cplx> coeff(tones.size(), cplx{});
        for (std::size_t k = 0; k < tones.size(); ++k) {
            if (tones.subband[k] == sb) coeff[k] = tones.power[k] / total;
        }
        const double center_hz = sb == 0 ? out.f_c1_hz : out.f_c2_hz;
        const UniformToneSum g(tones, coeff, (center_hz - mask.reference_hz) * 1e-9);
        auto values = evaluate(axis.count, [&](std::size_t i) { return g(axis.at(i) * 1e9); });
        (sb == 0 ? out.g1 : out.g2) = std::move(values);
    }
    return out;
}

PredictedMinima predicted_minima(double delta_fc_hz, double subband_width_hz, std::size_t m_max) {
    if (!(delta_fc_hz > 0.0) || !(subband_width_hz > 0.0)) {
        throw InvalidInput("center spacing and subband width must be positive");
    }
    PredictedMinima p;
    for (std::size_t m = 0; m <= m_max; ++m) {
        p.gap_minima_s.push_back((static_cast<double>(m) + 0.5) / delta_fc_hz);
    }
    for (std::size_t k = 1; k <= m_max; ++k) {
        p.envelope_minima_s.push_back(static_cast<double>(k) / subband_width_hz);
    }
    return p;
}

DelayScan two_path_scan(const SpectralMask& mask, const TwoPathChannel& channel,
                        const DelayAxis& axis) {
    channel.validate();
    const ToneSet tones = tone_set(mask);
    const UniformToneSum g(tones, power_coefficients(tones));
    const double tau1_ns = channel.tau1_s * 1e9;
    const double tau2_ns = channel.tau2_s * 1e9;
    DelayScan scan{mask.scenario_id, axis, std::vector<double>(axis.count), false};
    parallel_for(axis.count, [&](std::size_t i) {
        const double tau_ns = axis.at(i) * 1e9;
        scan.values[i] =
            std::abs(channel.alpha1 * g(tau1_ns - tau_ns) + channel.alpha2 * g(tau2_ns - tau_ns));
    });
    return scan;
}

DelayScan two_path_scan(const Observation& observation, const DelayAxis& axis) {
    const ToneSet tones = tone_set(observation.mask);
    if (tones.size() != observation.y_stacked.size()) {
        throw InvalidInput("observation does not match its mask");
    }
    std::vector<cplx> coeff(tones.size());
    for (std::size_t k = 0; k < tones.size(); ++k) {
        coeff[k] = tones.weight[k] * observation.y_stacked[k];
    }
    const UniformToneSum corr(tones, coeff);
    DelayScan scan{observation.mask.scenario_id, axis, std::vector<double>(axis.count), false};
    parallel_for(axis.count,
                 [&](std::size_t i) { scan.values[i] = std::abs(corr(-axis.at(i) * 1e9)); });
    return scan;
}

PeakEstimate restricted_peak(const DelayScan& scan, double tau_true_s, double window_s) {
    const DelayAxis& ax = scan.axis;
    if (scan.values.size() != ax.count || ax.count < 3) throw InvalidInput("malformed delay scan");
    if (!(window_s >= 5.0 * ax.step_s * (1.0 - 1e-9))) {
        throw InvalidInput("peak window must cover at least 5 grid steps");
    }
    const double lo_pos = (tau_true_s - window_s - ax.start_s) / ax.step_s;
    const double hi_pos = (tau_true_s + window_s - ax.start_s) / ax.step_s;
    if (!(lo_pos > 0.0) || !(hi_pos < static_cast<double>(ax.count - 1))) {
        throw InvalidInput("peak window around " + std::to_string(tau_true_s * 1e9) +
                           " ns touches the delay-axis boundary");
    }
    const auto i_lo = static_cast<std::size_t>(std::ceil(lo_pos - 1e-9));
    const auto i_hi = static_cast<std::size_t>(std::floor(hi_pos + 1e-9));

    std::size_t best = i_lo;
    for (std::size_t i = i_lo + 1; i <= i_hi; ++i) {
        if (scan.values[i] > scan.values[best]) best = i;
    }

    PeakEstimate est;
    est.tau_true_s = tau_true_s;
    est.window_s = window_s;
    est.tau_hat_s = ax.at(best);
    if (best > i_lo && best < i_hi) {
        const double y0 = scan.values[best - 1];
        const double y1 = scan.values[best];
        const double y2 = scan.values[best + 1];
        const double curvature = y0 - 2.0 * y1 + y2;
        if (curvature < 0.0) {
            const double delta = 0.5 * (y0 - y2) / curvature;
            if (std::abs(delta) <= 0.5) {
                est.tau_hat_s += delta * ax.step_s;
                est.refined = true;
            }
        }
    }
    est.offset_s = est.tau_hat_s - tau_true_s;
    return est;
}

PeakReport extract_peaks(const DelayScan& scan, const TwoPathChannel& channel, double window_s) {
    PeakReport r;
    r.scenario_id = scan.scenario_id;
    r.windows_overlap = channel.tau2_s - channel.tau1_s < 2.0 * window_s;
    r.first = restricted_peak(scan, channel.tau1_s, window_s);
    r.second = restricted_peak(scan, channel.tau2_s, window_s);
    return r;
}

LeakageCurve leakage(const SpectralMask& mask, std::span<const double> delta_tau_s) {
    for (double d : delta_tau_s) {
        if (!(d >= 0.0)) throw InvalidInput("leakage separations must be >= 0");
    }
    const ToneSet tones = tone_set(mask);
    const UniformToneSum g(tones, power_coefficients(tones));
    const double peak = std::abs(g(0.0));
    LeakageCurve curve;
    curve.delta_tau_s.assign(delta_tau_s.begin(), delta_tau_s.end());
    curve.level.resize(delta_tau_s.size());
    parallel_for(delta_tau_s.size(), [&](std::size_t i) {
        curve.level[i] = std::abs(g(delta_tau_s[i] * 1e9)) / peak;
    });
    return curve;
}

}  // namespace gapdelay
