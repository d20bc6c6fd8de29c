#pragma once

// Multipath channel synthesis on a spectral mask: CFR, the noiseless mean
// model, SNR calibration, noisy observations and the inverse-DFT CIR.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gapdelay/spectrum.hpp"

namespace gapdelay {

using cplx = std::complex<double>;

struct Path {
    cplx alpha;
    double tau_s = 0.0;
};

/// L >= 1 paths with finite gains and nonnegative delays.
class PathSet {
public:
    explicit PathSet(std::vector<Path> paths);

    const std::vector<Path>& paths() const { return paths_; }
    std::size_t size() const { return paths_.size(); }

    /// Union of two path sets.
    PathSet operator+(const PathSet& other) const;

private:
    std::vector<Path> paths_;
};

struct TwoPathChannel {
    double tau1_s = 5e-9;
    double tau2_s = 15e-9;
    cplx alpha1{1.0, 0.0};
    cplx alpha2 = std::polar(0.7, 3.14159265358979323846 / 3.0);

    double delta_tau_s() const { return tau2_s - tau1_s; }
    PathSet paths() const;
    /// Throws InvalidInput unless 0 <= tau1 <= tau2 and gains are finite.
    void validate() const;
};

/// Dominant unit path plus a 0.7*exp(j*pi/3) reflection.
TwoPathChannel reference_channel(double tau1_s, double tau2_s);

/// theta = (tau1, tau2, Re a1, Im a1, Re a2, Im a2), delays in seconds.
struct ParamVector {
    std::array<double, 6> values{};

    double tau1_s() const { return values[0]; }
    double tau2_s() const { return values[1]; }
    cplx alpha1() const { return {values[2], values[3]}; }
    cplx alpha2() const { return {values[4], values[5]}; }

    static ParamVector from(const TwoPathChannel& ch);
    TwoPathChannel channel() const;
};

/// H[n] = sum_l alpha_l exp(-j2pi (f[n] - f_ref) tau_l) over the full grid.
std::vector<cplx> cfr(const PathSet& paths, const FrequencyGrid& grid, double reference_hz = 0.0);

/// mu[k] = a[n_k] * sum_l alpha_l exp(-j2pi (f[n_k] - f_ref) tau_l), n_k in K_s ascending.
std::vector<cplx> mean_model(const ParamVector& theta, const SpectralMask& mask);

/// ||mu||^2 / N_s.
double mean_tone_power(const ParamVector& theta, const SpectralMask& mask);

/// sigma^2 = (||mu(theta0)||^2 / N_s) / 10^(snr_db / 10).
double sigma_from_snr(const ParamVector& theta0, const SpectralMask& mask, double snr_db);

/// Seeded circularly-symmetric complex Gaussian source.
///
/// Algorithm: std::mt19937_64 drives 53-bit uniforms u in (0, 1]; pairs
/// (u1, u2) are mapped by Box-Muller to r = sqrt(-ln u1), phi = 2pi u2, and
/// the sample is sqrt(variance) * r * exp(j phi), so real and imaginary parts
/// each carry variance/2. Sequences are reproducible for a given seed.
class ComplexGaussianSource {
public:
    explicit ComplexGaussianSource(std::uint64_t seed);
    cplx operator()(double variance);

private:
    double uniform();
    std::mt19937_64 engine_;
};

struct Observation {
    SpectralMask mask;
    std::vector<std::size_t> tones;  // K_s ascending
    std::vector<cplx> y_full;        // length N_f, zero off K_s
    std::vector<cplx> y_stacked;     // y_full restricted to K_s
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
};

/// y[n] = a[n] H(f[n]) + w[n] on K_s with w ~ CN(0, sigma2).
Observation observe(const PathSet& paths, const SpectralMask& mask, double sigma2,
                    std::uint64_t seed);
Observation observe(const ParamVector& theta, const SpectralMask& mask, double sigma2,
                    std::uint64_t seed);

struct CirEstimate {
    std::vector<cplx> taps;
    double tap_spacing_s = 0.0;  // 1 / (N_f delta_f)

    double delay_s(std::size_t p) const { return static_cast<double>(p) * tap_spacing_s; }
    /// Unambiguous window N_f * T_s = 1 / delta_f.
    double window_s() const { return static_cast<double>(taps.size()) * tap_spacing_s; }
};

/// y[p] = (1/N_f) sum_n Y[n] exp(j2pi n p / N_f).
CirEstimate cir_idft(std::span<const cplx> y_full, const FrequencyGrid& grid);

}  // namespace gapdelay
