#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "gapdelay/channel.hpp"
#include "gapdelay/errors.hpp"
#include "oracles.hpp"

using namespace gapdelay;

namespace {

constexpr double GHz = 1e9;
constexpr double kPi = std::numbers::pi;

SpectralMask flat_mask(const Scenario& s) {
    MaskOptions o;
    o.shaping.preset = ShapingPreset::flat;
    return build_mask(s, o);
}

/// Single flat band holding `tones` used tones.
SpectralMask wide_flat_mask(std::size_t tones) {
    const double lo = 5.0 * GHz;
    return flat_mask(make_scenario("wide", {{lo, lo + static_cast<double>(tones) * kWifiSubcarrierSpacingHz}}));
}

double rel_err(cplx a, cplx b, double scale) { return std::abs(a - b) / scale; }

}  // namespace

TEST_CASE("reference channel point") {
    const TwoPathChannel ch = reference_channel(5e-9, 15e-9);
    CHECK(ch.alpha1 == cplx(1.0, 0.0));
    CHECK(std::abs(ch.alpha2) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(ch.alpha2.real() == doctest::Approx(0.35).epsilon(1e-14));
    CHECK(ch.alpha2.imag() == doctest::Approx(0.6062177826).epsilon(1e-9));
    CHECK(ch.delta_tau_s() == doctest::Approx(10e-9));
}

TEST_CASE("path set and channel validation") {
    CHECK_THROWS_AS(PathSet({}), InvalidInput);
    CHECK_THROWS_AS(PathSet({{cplx(1, 0), -1e-9}}), InvalidInput);
    CHECK_THROWS_AS(PathSet({{cplx(NAN, 0), 1e-9}}), InvalidInput);
    CHECK_THROWS_AS(reference_channel(10e-9, 5e-9), InvalidInput);
    CHECK_NOTHROW(reference_channel(5e-9, 5e-9));
    const PathSet u = PathSet({{cplx(1, 0), 1e-9}}) + PathSet({{cplx(0, 1), 2e-9}, {cplx(2, 0), 0.0}});
    CHECK(u.size() == 3);
}

TEST_CASE("param vector ordering") {
    const ParamVector p = ParamVector::from(reference_channel(5e-9, 15e-9));
    CHECK(p.values[0] == 5e-9);
    CHECK(p.values[1] == 15e-9);
    CHECK(p.values[2] == 1.0);
    CHECK(p.values[3] == 0.0);
    CHECK(p.values[4] == std::polar(0.7, kPi / 3).real());
    CHECK(p.values[5] == std::polar(0.7, kPi / 3).imag());
    CHECK(p.channel().alpha2 == p.alpha2());
}

TEST_CASE("cfr against the direct formula") {
    const FrequencyGrid g = build_grid(5.17 * GHz, 5.33 * GHz, kWifiSubcarrierSpacingHz);
    const PathSet paths({{cplx(1, 0), 5e-9}, {std::polar(0.7, kPi / 3), 15e-9}, {cplx(-0.2, 0.1), 31.7e-9}});
    for (double ref : {0.0, 5.25 * GHz}) {
        const auto h = cfr(paths, g, ref);
        for (std::size_t n = 0; n < g.n_tones; n += 13) {
            cplx expect{};
            for (const Path& p : paths.paths()) {
                // f*tau in cycles, evaluated in Hz and s.
                const double cycles = (g.f_start_hz + static_cast<double>(n) * g.delta_f_hz - ref) * p.tau_s;
                expect += p.alpha * std::exp(cplx(0.0, -2.0 * kPi * cycles));
            }
            CHECK(rel_err(h[n], expect, 1.0) < 1e-9);
        }
    }
}

TEST_CASE("cfr special cases") {
    const FrequencyGrid g = build_grid(5.49 * GHz, 5.57 * GHz, kWifiSubcarrierSpacingHz);
    for (cplx h : cfr(PathSet({{cplx(1, 0), 0.0}}), g)) CHECK(h == cplx(1.0, 0.0));

    const cplx a1{0.3, -0.2}, a2{0.5, 0.9};
    const double tau = 7.3e-9;
    const auto both = cfr(PathSet({{a1, tau}, {a2, tau}}), g, 5.5 * GHz);
    const auto single = cfr(PathSet({{a1 + a2, tau}}), g, 5.5 * GHz);
    for (std::size_t n = 0; n < g.n_tones; ++n) CHECK(rel_err(both[n], single[n], 1.0) < 1e-14);
}

TEST_CASE("cfr is linear in the path set") {
    const FrequencyGrid g = build_grid(5.97 * GHz, 6.13 * GHz, kWifiSubcarrierSpacingHz);
    const PathSet a({{cplx(1, 0), 5e-9}, {cplx(0.1, 0.4), 12e-9}});
    const PathSet b({{cplx(-0.6, 0.2), 8.5e-9}});
    const auto ha = cfr(a, g, 6.05 * GHz);
    const auto hb = cfr(b, g, 6.05 * GHz);
    const auto hab = cfr(a + b, g, 6.05 * GHz);
    for (std::size_t n = 0; n < g.n_tones; ++n) CHECK(rel_err(hab[n], ha[n] + hb[n], 1.0) < 1e-14);
}

TEST_CASE("cfr conjugate structure for real gains") {
    // On a grid symmetric about the reference, mirroring frequency is the
    // same as mirroring delay, so H(-f) = conj(H(f)) for real gains.
    const FrequencyGrid g = build_grid(5.49 * GHz, 5.57 * GHz, kWifiSubcarrierSpacingHz);
    const double ref = 0.5 * (g.f_start_hz + g.f_stop_hz());
    const auto h = cfr(PathSet({{cplx(1, 0), 5e-9}, {cplx(-0.7, 0), 11.1e-9}}), g, ref);
    for (std::size_t n = 0; n < g.n_tones; ++n) {
        CHECK(rel_err(h[n], std::conj(h[g.n_tones - 1 - n]), 1.0) < 1e-12);
    }
}

TEST_CASE("mean model") {
    const SpectralMask m = build_mask(require_scenario("A2"));
    const ParamVector theta = ParamVector::from(reference_channel(5e-9, 15e-9));
    const auto mu = mean_model(theta, m);
    const auto expect = oracle::mu(m, 5.0, 15.0, theta.alpha1(), theta.alpha2());
    REQUIRE(mu.size() == expect.size());
    REQUIRE(mu.size() == used_set(m).size());
    for (std::size_t k = 0; k < mu.size(); ++k) CHECK(rel_err(mu[k], expect[k], 1.0) < 1e-10);

    SUBCASE("single-path reduction") {
        ParamVector p = theta;
        p.values[4] = p.values[5] = 0.0;
        const auto m1 = mean_model(p, m);
        const auto e1 = oracle::mu(m, 5.0, 15.0, cplx(1, 0), cplx(0, 0));
        for (std::size_t k = 0; k < m1.size(); ++k) CHECK(rel_err(m1[k], e1[k], 1.0) < 1e-10);
    }

    SUBCASE("mean power by direct sum and matrix form") {
        const auto tones = used_set(m);
        Eigen::MatrixXcd x(tones.size(), 2);
        Eigen::VectorXd a(tones.size());
        for (std::size_t k = 0; k < tones.size(); ++k) {
            const double f = oracle::rel_ghz(m, tones[k]);
            x(k, 0) = std::exp(cplx(0, -2 * kPi * f * 5.0));
            x(k, 1) = std::exp(cplx(0, -2 * kPi * f * 15.0));
            a(k) = m.weights[tones[k]];
        }
        const Eigen::Vector2cd alpha(theta.alpha1(), theta.alpha2());
        const Eigen::VectorXcd mu_matrix = a.asDiagonal() * (x * alpha);
        const double matrix_power = mu_matrix.squaredNorm() / static_cast<double>(tones.size());
        double direct = 0.0;
        for (cplx v : expect) direct += std::norm(v);
        direct /= static_cast<double>(expect.size());
        CHECK(std::abs(matrix_power - direct) / direct < 1e-12);
        CHECK(std::abs(mean_tone_power(theta, m) - direct) / direct < 1e-12);
    }
}

TEST_CASE("sigma from SNR") {
    const SpectralMask m = build_mask(require_scenario("B2"));
    const ParamVector theta = ParamVector::from(reference_channel(5e-9, 10e-9));
    const double p = mean_tone_power(theta, m);
    CHECK(sigma_from_snr(theta, m, 0.0) == doctest::Approx(p).epsilon(1e-15));
    CHECK(sigma_from_snr(theta, m, 20.0) == doctest::Approx(p / 100.0).epsilon(1e-15));

    const SpectralMask flat = flat_mask(require_scenario("A1"));
    ParamVector unit = theta;
    unit.values[4] = unit.values[5] = 0.0;
    for (double snr : {-10.0, 0.0, 13.0, 40.0}) {
        CHECK(sigma_from_snr(unit, flat, snr) == doctest::Approx(std::pow(10.0, -snr / 10.0)).epsilon(1e-12));
    }

    ParamVector zero = theta;
    for (int i = 2; i < 6; ++i) zero.values[i] = 0.0;
    CHECK_THROWS_AS(sigma_from_snr(zero, m, 20.0), InvalidInput);
}

TEST_CASE("observation structure") {
    const SpectralMask m = build_mask(require_scenario("A3"));
    const ParamVector theta = ParamVector::from(reference_channel(5e-9, 15e-9));
    const Observation clean = observe(theta, m, 0.0, 7);
    const auto mu = mean_model(theta, m);
    REQUIRE(clean.y_stacked.size() == mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) CHECK(clean.y_stacked[k] == mu[k]);

    const Observation noisy = observe(theta, m, 0.3, 7);
    auto sorted = oracle::nonzero_tones(m);
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(noisy.tones == sorted);
    for (std::size_t k = 0; k < sorted.size(); ++k) CHECK(noisy.y_stacked[k] == noisy.y_full[sorted[k]]);
    for (std::size_t n = 0; n < m.weights.size(); ++n) {
        if (m.weights[n] == 0.0) CHECK(noisy.y_full[n] == cplx{});
    }

    const Observation again = observe(theta, m, 0.3, 7);
    CHECK(again.y_full == noisy.y_full);
    const Observation other = observe(theta, m, 0.3, 8);
    CHECK(other.y_full != noisy.y_full);

    CHECK_THROWS_AS(observe(theta, m, -1.0, 1), InvalidInput);
}

TEST_CASE("noise statistics over 1e5 tones") {
    const SpectralMask m = wide_flat_mask(100000);
    const double sigma2 = 0.37;
    const PathSet silent({{cplx(0, 0), 0.0}});
    const Observation obs = observe(silent, m, sigma2, 20241016);
    REQUIRE(obs.y_stacked.size() == 100000);
    double total = 0.0, re2 = 0.0, im2 = 0.0;
    cplx mean{};
    for (cplx w : obs.y_stacked) {
        total += std::norm(w);
        re2 += w.real() * w.real();
        im2 += w.imag() * w.imag();
        mean += w;
    }
    const double n = 100000.0;
    CHECK(std::abs(total / n - sigma2) / sigma2 < 0.02);
    CHECK(std::abs(re2 / n - sigma2 / 2) / (sigma2 / 2) < 0.02);
    CHECK(std::abs(im2 / n - sigma2 / 2) / (sigma2 / 2) < 0.02);
    CHECK(std::abs(mean / n) < 0.01);
}

TEST_CASE("SNR calibration closes the loop") {
    const SpectralMask m = wide_flat_mask(50000);
    const ParamVector theta = ParamVector::from(reference_channel(5e-9, 15e-9));
    for (double snr : {0.0, 20.0}) {
        const double sigma2 = sigma_from_snr(theta, m, snr);
        const Observation obs = observe(theta, m, sigma2, 99);
        const auto mu = mean_model(theta, m);
        double signal = 0.0, noise = 0.0;
        for (std::size_t k = 0; k < mu.size(); ++k) {
            signal += std::norm(mu[k]);
            noise += std::norm(obs.y_stacked[k] - mu[k]);
        }
        const double measured = signal / noise;
        CHECK(std::abs(measured / std::pow(10.0, snr / 10.0) - 1.0) < 0.01);
    }
}

TEST_CASE("gaussian source is reproducible") {
    ComplexGaussianSource a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(a(1.0) == b(1.0));
}

TEST_CASE("cir idft round trip") {
    const SpectralMask m = build_mask(require_scenario("A2"));
    const Observation obs = observe(ParamVector::from(reference_channel(5e-9, 15e-9)), m, 0.01, 3);
    // Small grid for the O(N^2) oracle.
    const FrequencyGrid g = build_grid(5.0 * GHz, 5.0 * GHz + 299 * kWifiSubcarrierSpacingHz, kWifiSubcarrierSpacingHz);
    std::vector<cplx> y(obs.y_full.begin(), obs.y_full.begin() + static_cast<long>(g.n_tones));
    const CirEstimate cir = cir_idft(y, g);
    const auto back = oracle::dft(cir.taps);
    double scale = 0.0;
    for (cplx v : y) scale = std::max(scale, std::abs(v));
    for (std::size_t n = 0; n < y.size(); ++n) CHECK(std::abs(back[n] - y[n]) / scale < 1e-9);
    CHECK(cir.tap_spacing_s == doctest::Approx(1.0 / (300 * kWifiSubcarrierSpacingHz)));
    CHECK(cir.window_s() == doctest::Approx(1.0 / kWifiSubcarrierSpacingHz));
}

TEST_CASE("cir of an on-grid impulse") {
    const FrequencyGrid g = build_grid(5.17 * GHz, 5.17 * GHz + 2047 * kWifiSubcarrierSpacingHz, kWifiSubcarrierSpacingHz);
    const double ts = 1.0 / (static_cast<double>(g.n_tones) * g.delta_f_hz);
    const std::size_t p0 = 37;
    // Referencing phases to f_start removes the carrier ramp.
    const auto h = cfr(PathSet({{cplx(1, 0), static_cast<double>(p0) * ts}}), g, g.f_start_hz);
    const CirEstimate cir = cir_idft(h, g);
    std::size_t best = 0;
    for (std::size_t p = 1; p < cir.taps.size(); ++p) {
        if (std::abs(cir.taps[p]) > std::abs(cir.taps[best])) best = p;
    }
    CHECK(best == p0);
    CHECK(std::abs(cir.taps[p0]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cir.delay_s(p0) == doctest::Approx(p0 * ts));

    const CirEstimate zero = cir_idft(std::vector<cplx>(g.n_tones), g);
    for (cplx v : zero.taps) CHECK(v == cplx{});

    CHECK_THROWS_AS(cir_idft(std::vector<cplx>(5), g), InvalidInput);
}
