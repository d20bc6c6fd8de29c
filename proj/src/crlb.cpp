#include "gapdelay/crlb.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gapdelay/errors.hpp"
#include "gapdelay/parallel.hpp"

namespace gapdelay {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double symmetric_condition(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

std::string describe(const ParamVector& theta, const std::string& scenario) {
    std::ostringstream os;
    os << "scenario '" << scenario << "' at tau1=" << theta.tau1_s() * 1e9
       << " ns, tau2=" << theta.tau2_s() * 1e9 << " ns";
    return os.str();
}

}  // namespace

DerivativeSet derivative_vectors(const ParamVector& theta, const SpectralMask& mask) {
    const ToneSet tones = tone_set(mask);
    const double tau1 = theta.tau1_s() * 1e9;
    const double tau2 = theta.tau2_s() * 1e9;
    const cplx a1 = theta.alpha1();
    const cplx a2 = theta.alpha2();
    const cplx j{0.0, 1.0};

    DerivativeSet out;
    for (auto& v : out.d) v.resize(tones.size());
    for (std::size_t k = 0; k < tones.size(); ++k) {
        const double f = tones.offset_ghz[k];
        const double a = tones.weight[k];
        const cplx e1 = std::polar(1.0, -2.0 * kPi * f * tau1);
        const cplx e2 = std::polar(1.0, -2.0 * kPi * f * tau2);
        out.d[0][k] = -j * 2.0 * kPi * a1 * a * f * e1;
        out.d[1][k] = -j * 2.0 * kPi * a2 * a * f * e2;
        out.d[2][k] = a * e1;
        out.d[3][k] = j * a * e1;
        out.d[4][k] = a * e2;
        out.d[5][k] = j * a * e2;
    }
    return out;
}

FimSums fim_sums(const ToneSet& tones, double delta_tau_ns) {
    FimSums s;
    for (std::size_t k = 0; k < tones.size(); ++k) {
        const double f = tones.offset_ghz[k];
        const double w = tones.power[k];
        const cplx e = std::polar(1.0, -2.0 * kPi * f * delta_tau_ns);
        s.p0 += w;
        s.p1 += w * f;
        s.p2 += w * f * f;
        s.s0 += w * e;
        s.s1 += w * f * e;
        s.s2 += w * f * f * e;
    }
    return s;
}

FimMatrix fim_closed_form(const ParamVector& theta, const SpectralMask& mask, double sigma2) {
    return fim_closed_form(theta, tone_set(mask), sigma2);
}

FimMatrix fim_closed_form(const ParamVector& theta, const ToneSet& tones, double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw InvalidInput("noise variance must be positive for the FIM");
    }
    const double dtau_ns = (theta.tau2_s() - theta.tau1_s()) * 1e9;
    const FimSums s = fim_sums(tones, dtau_ns);

    const cplx a1 = theta.alpha1();
    const cplx a2 = theta.alpha2();
    const cplx j{0.0, 1.0};
    const double c_gain = 2.0 / sigma2;
    const double c_mixed = 4.0 * kPi / sigma2;
    const double c_delay = 8.0 * kPi * kPi / sigma2;
    // sum |a|^2 f exp(+j2pi f dtau)
    const cplx s1_plus = std::conj(s.s1);

    FimMatrix fim;
    fim.sigma2 = sigma2;
    auto& I = fim.entries;

    I(0, 0) = c_delay * std::norm(a1) * s.p2;
    I(1, 1) = c_delay * std::norm(a2) * s.p2;
    I(0, 1) = c_delay * (a2 * std::conj(a1) * s.s2).real();

    I(2, 2) = I(3, 3) = I(4, 4) = I(5, 5) = c_gain * s.p0;
    I(2, 3) = 0.0;
    I(4, 5) = 0.0;
    I(2, 4) = I(3, 5) = c_gain * s.s0.real();
    I(2, 5) = -c_gain * s.s0.imag();
    I(3, 4) = c_gain * s.s0.imag();

    I(0, 2) = c_mixed * a1.imag() * s.p1;
    I(0, 3) = -c_mixed * a1.real() * s.p1;
    I(1, 4) = c_mixed * a2.imag() * s.p1;
    I(1, 5) = -c_mixed * a2.real() * s.p1;

    // Separation-dependent mixed terms. j*conj(a) = (Im a + j Re a).
    I(0, 4) = c_mixed * (j * std::conj(a1) * s.s1).real();
    I(0, 5) = -c_mixed * (std::conj(a1) * s.s1).real();
    I(1, 2) = c_mixed * (j * std::conj(a2) * s1_plus).real();
    I(1, 3) = -c_mixed * (std::conj(a2) * s1_plus).real();

    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < r; ++c) I(r, c) = I(c, r);
    }
    return fim;
}

EffectiveFim effective_fim(const FimMatrix& fim, const std::string& context) {
    const Eigen::Matrix4d iaa = fim.alpha_alpha();
    EffectiveFim out;
    out.cond_alpha_alpha = symmetric_condition(iaa);
    if (!(out.cond_alpha_alpha <= kSingularCondition)) {
        std::ostringstream os;
        os << "gain-gain FIM block is singular (condition " << out.cond_alpha_alpha << ")";
        if (!context.empty()) os << " for " << context;
        throw NumericalError(os.str());
    }
    const Eigen::Matrix<double, 4, 2> iat = fim.alpha_tau();
    const Eigen::Matrix<double, 4, 2> x = iaa.fullPivLu().solve(iat);
    out.info = fim.tau_tau() - fim.tau_alpha() * x;
    out.info = 0.5 * (out.info + out.info.transpose()).eval();
    return out;
}

CrlbResult crlb_delta_tau(const ParamVector& theta, const SpectralMask& mask, double sigma2) {
    CrlbResult r;
    r.scenario_id = mask.scenario_id;
    r.delta_tau_s = theta.tau2_s() - theta.tau1_s();
    r.sigma2 = sigma2;
    r.snr_db = kNaN;
    if (!(sigma2 > 0.0)) throw InvalidInput("noise variance must be positive for the CRLB");
    if (std::abs(r.delta_tau_s) * 1e9 < kMinSeparationNs) {
        r.near_singular = true;
        r.var_delta_tau_s2 = r.sqrt_crlb_s = r.cond_alpha_alpha = r.cond_eff = kNaN;
        return r;
    }

    const FimMatrix fim = fim_closed_form(theta, tone_set(mask), sigma2);
    const EffectiveFim eff = effective_fim(fim, describe(theta, mask.scenario_id));
    r.i_eff = eff.info;
    r.cond_alpha_alpha = eff.cond_alpha_alpha;
    r.cond_eff = symmetric_condition(eff.info);
    if (!(r.cond_eff <= kSingularCondition)) {
        throw NumericalError("effective delay FIM is singular for " +
                             describe(theta, mask.scenario_id));
    }
    const Eigen::Vector2d g(-1.0, 1.0);
    const double var_ns2 = g.dot(eff.info.fullPivLu().solve(g));
    r.var_delta_tau_s2 = var_ns2 * 1e-18;
    r.sqrt_crlb_s = std::sqrt(var_ns2) * 1e-9;
    return r;
}

CrlbResult crlb_at_snr(const ParamVector& theta, const SpectralMask& mask, double snr_db) {
    CrlbResult r = crlb_delta_tau(theta, mask, sigma_from_snr(theta, mask, snr_db));
    r.snr_db = snr_db;
    return r;
}

std::vector<Scenario> scenario_variants(const Scenario& scenario) {
    std::vector<Scenario> v{scenario};
    ContiguousReference ref = contiguous_reference(scenario);
    if (!ref.identity) v.push_back(std::move(ref.scenario));
    return v;
}

std::vector<CrlbCurve> sweep_snr(const Scenario& scenario, const SweepSettings& settings,
                                 double delta_tau_s, std::span<const double> snr_grid_db) {
    if (snr_grid_db.empty()) throw InvalidInput("SNR grid is empty");
    TwoPathChannel ch = settings.channel;
    ch.tau2_s = ch.tau1_s + delta_tau_s;
    ch.validate();
    const ParamVector theta = ParamVector::from(ch);

    std::vector<CrlbCurve> curves;
    for (const Scenario& variant : scenario_variants(scenario)) {
        const SpectralMask mask = build_mask(variant, settings.mask);
        CrlbCurve curve{variant.id, variant.is_contiguous_reference(), {}};
        curve.rows.resize(snr_grid_db.size());
        parallel_for(
            snr_grid_db.size(),
            [&](std::size_t i) { curve.rows[i] = crlb_at_snr(theta, mask, snr_grid_db[i]); },
            settings.workers);
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<CrlbCurve> sweep_delta_tau(const Scenario& scenario, const SweepSettings& settings,
                                       double snr_db, std::span<const double> delta_tau_grid_s) {
    if (delta_tau_grid_s.empty()) throw InvalidInput("separation grid is empty");
    for (std::size_t i = 0; i < delta_tau_grid_s.size(); ++i) {
        if (!(delta_tau_grid_s[i] > 0.0) || (i > 0 && !(delta_tau_grid_s[i] > delta_tau_grid_s[i - 1]))) {
            throw InvalidInput("separation grid must be positive and strictly ascending");
        }
    }
    std::vector<CrlbCurve> curves;
    for (const Scenario& variant : scenario_variants(scenario)) {
        const SpectralMask mask = build_mask(variant, settings.mask);
        CrlbCurve curve{variant.id, variant.is_contiguous_reference(), {}};
        curve.rows.resize(delta_tau_grid_s.size());
        parallel_for(
            delta_tau_grid_s.size(),
            [&](std::size_t i) {
                TwoPathChannel ch = settings.channel;
                ch.tau2_s = ch.tau1_s + delta_tau_grid_s[i];
                curve.rows[i] = crlb_at_snr(ParamVector::from(ch), mask, snr_db);
            },
            settings.workers);
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw InvalidInput("invalid linear grid");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = start + static_cast<double>(i) * step;
    return g;
}

std::vector<double> log_grid(double start, double stop, std::size_t points) {
    if (!(start > 0.0) || !(stop > start) || points < 2) throw InvalidInput("invalid log grid");
    std::vector<double> g(points);
    const double ratio = std::log(stop / start);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = start * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    g.back() = stop;
    return g;
}

std::vector<double> default_snr_grid() { return linear_grid(-10.0, 40.0, 2.0); }

std::vector<double> default_delta_tau_grid() { return log_grid(0.1e-9, 50e-9, 400); }

}  // namespace gapdelay
