#pragma once

// Two-path Fisher information, its Schur-complement reduction to the delays,
// and the Cramer-Rao bound on the delay separation.
//
// Units: internally frequencies are GHz offsets from the mask's phase
// reference and delays are ns, so FIM rows/columns for tau1, tau2 are in
// 1/ns. Variances in CrlbResult are converted back to s^2.

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "gapdelay/channel.hpp"
#include "gapdelay/spectrum.hpp"

namespace gapdelay {

/// d_i = d mu / d theta_i, each of length N_s. d1, d2 are per ns.
struct DerivativeSet {
    std::array<std::vector<cplx>, 6> d;
};

DerivativeSet derivative_vectors(const ParamVector& theta, const SpectralMask& mask);

struct FimMatrix {
    Eigen::Matrix<double, 6, 6> entries = Eigen::Matrix<double, 6, 6>::Zero();
    double sigma2 = 0.0;

    auto tau_tau() const { return entries.topLeftCorner<2, 2>(); }
    auto tau_alpha() const { return entries.topRightCorner<2, 4>(); }
    auto alpha_tau() const { return entries.bottomLeftCorner<4, 2>(); }
    auto alpha_alpha() const { return entries.bottomRightCorner<4, 4>(); }
};

/// Weighted tone sums that every closed-form FIM entry is built from.
struct FimSums {
    double p0 = 0.0;  // sum |a|^2
    double p1 = 0.0;  // sum |a|^2 f
    double p2 = 0.0;  // sum |a|^2 f^2
    cplx s0, s1, s2;  // sum |a|^2 f^k exp(-j2pi f dtau), k = 0, 1, 2
};

FimSums fim_sums(const ToneSet& tones, double delta_tau_ns);

/// Closed-form 6x6 FIM. Throws InvalidInput if sigma2 <= 0.
FimMatrix fim_closed_form(const ParamVector& theta, const SpectralMask& mask, double sigma2);
FimMatrix fim_closed_form(const ParamVector& theta, const ToneSet& tones, double sigma2);

/// Condition number above which I_aa is treated as singular.
inline constexpr double kSingularCondition = 1e12;

struct EffectiveFim {
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();  // 1/ns^2
    double cond_alpha_alpha = 0.0;
};

/// I_eff = I_tt - I_ta I_aa^{-1} I_at, solved with pivoting. Throws
/// NumericalError (mentioning `context`) if I_aa is singular.
EffectiveFim effective_fim(const FimMatrix& fim, const std::string& context = {});

/// Separations below this are flagged instead of evaluated.
inline constexpr double kMinSeparationNs = 1e-3;

struct CrlbResult {
    std::string scenario_id;
    double snr_db = 0.0;
    double delta_tau_s = 0.0;
    double sigma2 = 0.0;
    double var_delta_tau_s2 = 0.0;
    double sqrt_crlb_s = 0.0;
    Eigen::Matrix2d i_eff = Eigen::Matrix2d::Zero();
    double cond_alpha_alpha = 0.0;
    double cond_eff = 0.0;
    /// Paths closer than kMinSeparationNs: the bound diverges and the
    /// numeric fields hold NaN.
    bool near_singular = false;

    double sqrt_crlb_ns() const { return sqrt_crlb_s * 1e9; }
};

/// var(dtau) >= g^T I_eff^{-1} g, g = [-1, 1].
CrlbResult crlb_delta_tau(const ParamVector& theta, const SpectralMask& mask, double sigma2);

/// crlb_delta_tau with sigma2 calibrated from `snr_db` at theta.
CrlbResult crlb_at_snr(const ParamVector& theta, const SpectralMask& mask, double snr_db);

struct SweepSettings {
    MaskOptions mask;
    /// tau1 and both gains are taken from here; tau2 follows the sweep.
    TwoPathChannel channel = reference_channel(5e-9, 15e-9);
    unsigned workers = 0;
};

struct CrlbCurve {
    std::string variant_id;
    bool is_reference = false;
    std::vector<CrlbResult> rows;
};

/// The scenario itself, plus its contiguous reference when it has a gap.
std::vector<Scenario> scenario_variants(const Scenario& scenario);

std::vector<CrlbCurve> sweep_snr(const Scenario& scenario, const SweepSettings& settings,
                                 double delta_tau_s, std::span<const double> snr_grid_db);

std::vector<CrlbCurve> sweep_delta_tau(const Scenario& scenario, const SweepSettings& settings,
                                       double snr_db, std::span<const double> delta_tau_grid_s);

/// -10 .. 40 dB in 2 dB steps.
std::vector<double> default_snr_grid();

/// Logarithmic 0.1 .. 50 ns, 400 points, in seconds.
std::vector<double> default_delta_tau_grid();

std::vector<double> linear_grid(double start, double stop, double step);
std::vector<double> log_grid(double start, double stop, std::size_t points);

}  // namespace gapdelay
