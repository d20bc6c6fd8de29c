#include "gapdelay/channel.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "gapdelay/errors.hpp"

namespace gapdelay {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-j2pi f tau) with f in GHz and tau in ns.
cplx phasor(double f_ghz, double tau_ns) { return std::polar(1.0, -kTwoPi * f_ghz * tau_ns); }

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

PathSet::PathSet(std::vector<Path> paths) : paths_(std::move(paths)) {
    if (paths_.empty()) throw InvalidInput("path set must hold at least one path");
    for (const Path& p : paths_) {
        if (!std::isfinite(p.alpha.real()) || !std::isfinite(p.alpha.imag())) {
            throw InvalidInput("path gain must be finite");
        }
        if (!(p.tau_s >= 0.0) || !std::isfinite(p.tau_s)) {
            throw InvalidInput("path delay must be finite and >= 0");
        }
    }
}

PathSet PathSet::operator+(const PathSet& other) const {
    std::vector<Path> all = paths_;
    all.insert(all.end(), other.paths_.begin(), other.paths_.end());
    return PathSet(std::move(all));
}

PathSet TwoPathChannel::paths() const {
    return PathSet({{alpha1, tau1_s}, {alpha2, tau2_s}});
}

void TwoPathChannel::validate() const {
    if (!(tau1_s >= 0.0) || !(tau2_s >= tau1_s) || !std::isfinite(tau2_s)) {
        throw InvalidInput("two-path channel needs 0 <= tau1 <= tau2");
    }
    for (cplx a : {alpha1, alpha2}) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw InvalidInput("two-path channel gains must be finite");
        }
    }
}

TwoPathChannel reference_channel(double tau1_s, double tau2_s) {
    TwoPathChannel ch;
    ch.tau1_s = tau1_s;
    ch.tau2_s = tau2_s;
    ch.validate();
    return ch;
}

ParamVector ParamVector::from(const TwoPathChannel& ch) {
    return ParamVector{{ch.tau1_s, ch.tau2_s, ch.alpha1.real(), ch.alpha1.imag(),
                        ch.alpha2.real(), ch.alpha2.imag()}};
}

TwoPathChannel ParamVector::channel() const {
    return TwoPathChannel{tau1_s(), tau2_s(), alpha1(), alpha2()};
}

std::vector<cplx> cfr(const PathSet& paths, const FrequencyGrid& grid, double reference_hz) {
    std::vector<cplx> h(grid.n_tones, cplx{});
    const double start_offset_hz = grid.f_start_hz - reference_hz;
    for (std::size_t n = 0; n < grid.n_tones; ++n) {
        const double f_ghz = (start_offset_hz + static_cast<double>(n) * grid.delta_f_hz) * 1e-9;
        cplx acc{};
        for (const Path& p : paths.paths()) acc += p.alpha * phasor(f_ghz, p.tau_s * 1e9);
        h[n] = acc;
    }
    return h;
}

std::vector<cplx> mean_model(const ParamVector& theta, const SpectralMask& mask) {
    const ToneSet tones = tone_set(mask);
    const double tau1_ns = theta.tau1_s() * 1e9;
    const double tau2_ns = theta.tau2_s() * 1e9;
    const cplx a1 = theta.alpha1();
    const cplx a2 = theta.alpha2();
    std::vector<cplx> mu(tones.size());
    for (std::size_t k = 0; k < tones.size(); ++k) {
        const double f = tones.offset_ghz[k];
        mu[k] = tones.weight[k] * (a1 * phasor(f, tau1_ns) + a2 * phasor(f, tau2_ns));
    }
    return mu;
}

double mean_tone_power(const ParamVector& theta, const SpectralMask& mask) {
    const std::vector<cplx> mu = mean_model(theta, mask);
    double energy = 0.0;
    for (cplx v : mu) energy += std::norm(v);
    return energy / static_cast<double>(mu.size());
}

double sigma_from_snr(const ParamVector& theta0, const SpectralMask& mask, double snr_db) {
    if (!std::isfinite(snr_db)) throw InvalidInput("SNR must be finite");
    const double power = mean_tone_power(theta0, mask);
    if (!(power > 0.0)) {
        throw InvalidInput("mean model of '" + mask.scenario_id +
                           "' has zero power; SNR is undefined");
    }
    return power / std::pow(10.0, snr_db / 10.0);
}

ComplexGaussianSource::ComplexGaussianSource(std::uint64_t seed) : engine_(seed) {}

double ComplexGaussianSource::uniform() {
    // 53 random bits mapped to (0, 1]; zero is excluded for the logarithm.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

cplx ComplexGaussianSource::operator()(double variance) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1) * variance);
    return std::polar(r, kTwoPi * u2);
}

Observation observe(const PathSet& paths, const SpectralMask& mask, double sigma2,
                    std::uint64_t seed) {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw InvalidInput("noise variance must be finite and >= 0");
    }
    Observation obs;
    obs.mask = mask;
    obs.tones = used_set(mask);
    obs.sigma2 = sigma2;
    obs.seed = seed;
    const std::vector<cplx> h = cfr(paths, mask.grid, mask.reference_hz);
    obs.y_full.assign(mask.grid.n_tones, cplx{});
    obs.y_stacked.reserve(obs.tones.size());
    ComplexGaussianSource noise(seed);
    for (std::size_t n : obs.tones) {
        cplx y = mask.weights[n] * h[n];
        if (sigma2 > 0.0) y += noise(sigma2);
        obs.y_full[n] = y;
        obs.y_stacked.push_back(y);
    }
    return obs;
}

Observation observe(const ParamVector& theta, const SpectralMask& mask, double sigma2,
                    std::uint64_t seed) {
    return observe(theta.channel().paths(), mask, sigma2, seed);
}

CirEstimate cir_idft(std::span<const cplx> y_full, const FrequencyGrid& grid) {
    if (y_full.size() != grid.n_tones) {
        throw InvalidInput("CFR length " + std::to_string(y_full.size()) +
                           " does not match grid size " + std::to_string(grid.n_tones));
    }
    const std::size_t n = y_full.size();
    CirEstimate cir;
    cir.tap_spacing_s = 1.0 / (static_cast<double>(n) * grid.delta_f_hz);
    cir.taps.assign(y_full.begin(), y_full.end());

    auto* data = reinterpret_cast<fftw_complex*>(cir.taps.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (cplx& v : cir.taps) v *= scale;
    return cir;
}

}  // namespace gapdelay
