// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gapdelay/crlb.hpp"
#include "gapdelay/delay_response.hpp"
#include "oracles.hpp"

using namespace gapdelay;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<std::string> kSix{"A1", "A2", "A3", "B1", "B2", "B3"};
const std::vector<std::string> kGapped{"A2", "A3", "B2", "B3"};

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int digits = 3) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

double tau1_of(const std::string&) { return 5e-9; }
double tau2_of(const std::string& id) { return id.front() == 'A' ? 15e-9 : 10e-9; }

MaskOptions with_preset(ShapingPreset p) {
    MaskOptions o;
    o.shaping.preset = p;
    return o;
}

// Small entries are compared against 1e-6 of their Cauchy-Schwarz scale.
double entrywise_rel(const Eigen::Matrix<double, 6, 6>& a, const Eigen::Matrix<double, 6, 6>& b) {
    double worst = 0.0;
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) {
            const double floor = 1e-6 * std::sqrt(b(r, r) * b(c, c));
            worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / std::max(std::abs(b(r, c)), floor));
        }
    }
    return worst;
}

Outcome fim_oracle() {
    const auto t0 = Clock::now();
    double worst_gram = 0.0, worst_fd = 0.0;
    for (const std::string& id : kSix) {
        const SpectralMask m = build_mask(require_scenario(id));
        const ParamVector theta = ParamVector::from(reference_channel(5e-9, 15e-9));
        const double sigma2 = sigma_from_snr(theta, m, 20.0);
        const FimMatrix fim = fim_closed_form(theta, m, sigma2);
        const auto d_oracle = oracle::derivatives(m, 5.0, 15.0, theta.alpha1(), theta.alpha2());
        worst_gram = std::max(worst_gram, entrywise_rel(fim.entries, oracle::gram_fim(d_oracle, sigma2)));

        const DerivativeSet d = derivative_vectors(theta, m);
        for (int i = 0; i < 6; ++i) {
            const double step = i < 2 ? 1e-13 : 1e-6;
            const double unit = i < 2 ? 1e-4 : 1e-6;
            ParamVector plus = theta, minus = theta;
            plus.values[i] += step;
            minus.values[i] -= step;
            const auto mp = mean_model(plus, m);
            const auto mm = mean_model(minus, m);
            double scale = 0.0, err = 0.0;
            for (cplx v : d.d[i]) scale = std::max(scale, std::abs(v));
            for (std::size_t k = 0; k < mp.size(); ++k) {
                err = std::max(err, std::abs((mp[k] - mm[k]) / (2.0 * unit) - d.d[i][k]));
            }
            worst_fd = std::max(worst_fd, err / scale);
        }
    }
    const double elapsed = seconds_since(t0);
    return {worst_gram < 1e-10 && worst_fd < 1e-6 && elapsed < 10.0,
            "gram rel " + num(worst_gram) + ", finite-difference rel " + num(worst_fd) + ", " +
                num(elapsed) + " s"};
}

Outcome schur_consistency() {
    double worst = 0.0;
    std::size_t points = 0;
    for (const Scenario& s : scenario_catalog()) {
        const SpectralMask m = build_mask(s);
        for (double dtau_ns : {0.7, 13.3}) {
            const ParamVector theta = ParamVector::from(reference_channel(5e-9, (5.0 + dtau_ns) * 1e-9));
            const FimMatrix fim = fim_closed_form(theta, m, sigma_from_snr(theta, m, 20.0));
            const Eigen::Vector2d g(-1.0, 1.0);
            const double schur = g.dot(effective_fim(fim).info.fullPivLu().solve(g));
            const Eigen::Matrix<double, 6, 6> inv = fim.entries.fullPivLu().inverse();
            const double full = inv(0, 0) + inv(1, 1) - inv(0, 1) - inv(1, 0);
            worst = std::max(worst, std::abs(schur - full) / std::abs(full));
            ++points;
        }
    }
    return {worst < 1e-9 && points == 20, std::to_string(points) + " points, max rel " + num(worst)};
}

Outcome snr_scaling() {
    const double doubling_db = 20.0 * std::log10(2.0);
    double worst = 0.0;
    for (const std::string& id : kSix) {
        const SpectralMask m = build_mask(require_scenario(id));
        const ParamVector theta = ParamVector::from(reference_channel(tau1_of(id), tau2_of(id)));
        for (double snr : {-10.0, 0.0, 7.0, 20.0}) {
            const double base = crlb_at_snr(theta, m, snr).sqrt_crlb_s;
            const double half = crlb_at_snr(theta, m, snr + doubling_db).sqrt_crlb_s;
            const double tenth = crlb_at_snr(theta, m, snr + 20.0).sqrt_crlb_s;
            worst = std::max({worst, std::abs(base / half - 2.0) / 2.0, std::abs(base / tenth - 10.0) / 10.0});
        }
    }
    return {worst < 1e-9, "max rel " + num(worst)};
}

std::vector<double> snr_curve(const std::string& id, double dtau_s, std::size_t variant = 0) {
    SweepSettings st;
    st.channel = reference_channel(tau1_of(id), tau2_of(id));
    const auto curves = sweep_snr(require_scenario(id), st, dtau_s, default_snr_grid());
    std::vector<double> y;
    for (const CrlbResult& r : curves.at(variant).rows) y.push_back(r.sqrt_crlb_s);
    return y;
}

Outcome aperture_ordering() {
    std::size_t violations = 0, checked = 0;
    for (double dtau : {1e-9, 10e-9}) {
        for (auto [wide, narrow] : {std::pair{"A2", "A1"}, {"B2", "B1"}}) {
            const auto w = snr_curve(wide, dtau), n = snr_curve(narrow, dtau);
            for (std::size_t i = 0; i < w.size(); ++i, ++checked) {
                if (!(w[i] < n[i])) ++violations;
            }
        }
    }
    return {violations == 0, std::to_string(violations) + " of " + std::to_string(checked) + " points violate"};
}

Outcome gap_penalty() {
    std::size_t violations = 0, checked = 0;
    double min_ratio = 1e300;
    for (const std::string& id : kGapped) {
        const auto gapped = snr_curve(id, 1e-9, 0), contiguous = snr_curve(id, 1e-9, 1);
        for (std::size_t i = 0; i < gapped.size(); ++i, ++checked) {
            if (!(gapped[i] >= contiguous[i])) ++violations;
            min_ratio = std::min(min_ratio, gapped[i] / contiguous[i]);
        }
    }
    return {violations == 0, std::to_string(violations) + " of " + std::to_string(checked) +
                                 " points violate, min gapped/contiguous " + num(min_ratio, 4)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome oscillation_scale() {
    // Oscillatory band 1..20 ns; extrema of the curve normalized to its peak.
    const std::vector<double> grid = linear_grid(1e-9, 20e-9, 0.01e-9);
    Outcome o;
    for (const std::string& id : kGapped) {
        SweepSettings st;
        st.channel = reference_channel(tau1_of(id), tau2_of(id));
        const auto curve = sweep_delta_tau(require_scenario(id), st, 20.0, grid).front();
        std::vector<double> y;
        for (const CrlbResult& r : curve.rows) y.push_back(r.sqrt_crlb_s);
        const double peak = *std::max_element(y.begin(), y.end());
        for (double& v : y) v /= peak;
        auto ext = local_extrema(y, ExtremumKind::maximum);
        const auto minima = local_extrema(y, ExtremumKind::minimum);
        ext.insert(ext.end(), minima.begin(), minima.end());
        std::sort(ext.begin(), ext.end());

        const double period_ns = 1e9 / *subband_centers(build_mask(require_scenario(id))).spacing_hz;
        std::vector<double> spacing;
        for (std::size_t i = 1; i < ext.size(); ++i) spacing.push_back((grid[ext[i]] - grid[ext[i - 1]]) * 1e9);
        const double med = spacing.empty() ? 0.0 : median(spacing);
        const double dev = std::abs(med / period_ns - 1.0);
        if (!(dev <= 0.10)) o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + id + " median " + num(med) + " ns vs " + num(period_ns) +
                    " ns (" + num(100.0 * dev, 2) + "%)";
    }
    return o;
}

Outcome leakage_minima() {
    const DelayAxis axis = DelayAxis::range(0.0, 25e-9, 1e-12);
    const LeakageCurve l = leakage(build_mask(require_scenario("A2")), axis.values());
    const auto minima = local_extrema(l.level, ExtremumKind::minimum);
    auto near = [&](double target_s, double& found_s) {
        double best = 1.0;
        for (std::size_t i : minima) {
            if (std::abs(axis.at(i) - target_s) < std::abs(best - target_s)) best = axis.at(i);
        }
        found_s = best;
        return std::abs(best - target_s) <= 0.05 * target_s;
    };
    Outcome o;
    for (double target_ns : {2.083, 6.25, 10.417, 14.583, 18.75}) {
        double found = 0.0;
        if (!near(target_ns * 1e-9, found)) o.pass = false;
        o.detail += num(found * 1e9, 5) + " ";
    }
    double envelope = 0.0;
    if (!near(12.5e-9, envelope)) o.pass = false;
    o.detail = "minima at " + o.detail + "ns, envelope null " + num(envelope * 1e9, 5) + " ns";
    return o;
}

Outcome resolution_anchors() {
    const DelayAxis axis = DelayAxis::range(0.0, 20e-9, 1e-12);
    Outcome o;
    for (auto [id, expected_ns] : {std::pair{"A1", 6.25}, {"B1", 3.125}}) {
        const DelayScan g = single_path_response(build_mask(require_scenario(id), with_preset(ShapingPreset::flat)), axis);
        const auto minima = local_extrema(g.values, ExtremumKind::minimum);
        const double first_ns = minima.empty() ? 0.0 : axis.at(minima.front()) * 1e9;
        if (!(std::abs(first_ns - expected_ns) <= 1e-3 + 1e-9)) o.pass = false;
        o.detail += std::string(o.detail.empty() ? "" : ", ") + id + " " + num(first_ns, 6) + " ns";
    }
    return o;
}

Outcome recombination() {
    const DelayAxis axis = default_delay_axis();
    double worst = 0.0;
    std::size_t cases = 0;
    for (const std::string& id : {"A2", "A3", "B1", "B2", "B3"}) {
        for (ShapingPreset p : {ShapingPreset::flat, ShapingPreset::flat_taper, ShapingPreset::toneplan_11ax}) {
            const SpectralMask m = build_mask(require_scenario(id), with_preset(p));
            const std::vector<cplx> rec = subband_decomposition(m, axis).recombined();
            const std::vector<cplx> g = single_path_response_complex(m, axis.values());
            const double g0 = std::abs(single_path_response_complex(m, std::vector<double>{0.0}).front());
            for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(rec[i] - g[i] / g0));
            ++cases;
        }
    }
    return {worst < 1e-10, std::to_string(cases) + " masks, max rel " + num(worst)};
}

Outcome table_two() {
    const std::vector<std::array<double, 2>> published{{-0.161, 0.229},  {0.156, -0.409}, {0.019, -0.025},
                                                       {-0.084, 0.116},  {-0.057, 0.108}, {0.080, -0.208}};
    const DelayAxis axis = default_delay_axis();
    std::vector<std::array<double, 2>> got;
    Outcome o;
    double worst_dev = 0.0;
    for (std::size_t s = 0; s < kSix.size(); ++s) {
        const TwoPathChannel ch = reference_channel(tau1_of(kSix[s]), tau2_of(kSix[s]));
        const PeakReport r = extract_peaks(two_path_scan(build_mask(require_scenario(kSix[s])), ch, axis), ch);
        got.push_back({r.first.offset_s * 1e9, r.second.offset_s * 1e9});
        for (int l = 0; l < 2; ++l) {
            const double v = got[s][l], want = published[s][l];
            if (!(std::abs(v) < 0.5)) o.pass = false;
            if ((v > 0) != (want > 0)) o.pass = false;
            worst_dev = std::max(worst_dev, std::abs(v - want));
        }
        o.detail += kSix[s] + " (" + num(got[s][0], 3) + ", " + num(got[s][1], 3) + ") ";
    }
    for (int l = 0; l < 2; ++l) {
        if (!(std::abs(got[2][l]) < std::abs(got[0][l]) && std::abs(got[2][l]) < std::abs(got[1][l]))) {
            o.pass = false;
        }
    }
    if (!(worst_dev <= 0.15)) o.pass = false;
    o.detail += "ns, max deviation " + num(worst_dev) + " ns";
    return o;
}

Outcome normalization_psd() {
    const std::vector<double> dtau = default_delay_axis().values();
    bool leak_ok = true, fim_ok = true;
    double worst_eig = 0.0;
    for (const std::string& id : kSix) {
        for (ShapingPreset p : {ShapingPreset::flat, ShapingPreset::flat_taper, ShapingPreset::toneplan_11ax}) {
            const SpectralMask m = build_mask(require_scenario(id), with_preset(p));
            const LeakageCurve l = leakage(m, dtau);
            if (l.level.front() != 1.0) leak_ok = false;
            if (*std::max_element(l.level.begin(), l.level.end()) > 1.0) leak_ok = false;
            for (double dtau_ns : {0.3, 1.0, 4.2, 10.0, 33.0}) {
                const ParamVector theta = ParamVector::from(reference_channel(5e-9, (5.0 + dtau_ns) * 1e-9));
                const FimMatrix fim = fim_closed_form(theta, m, sigma_from_snr(theta, m, 20.0));
                const auto& e = fim.entries;
                if ((e - e.transpose()).cwiseAbs().maxCoeff() != 0.0) fim_ok = false;
                if (e(2, 3) != 0.0 || e(3, 2) != 0.0 || e(4, 5) != 0.0 || e(5, 4) != 0.0) fim_ok = false;
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(e);
                const double rel = eig.eigenvalues().minCoeff() / e.norm();
                worst_eig = std::min(worst_eig, rel);
                if (rel < -1e-9) fim_ok = false;
            }
        }
    }
    return {leak_ok && fim_ok, std::string("leakage ") + (leak_ok ? "ok" : "violated") + ", FIM " +
                                   (fim_ok ? "ok" : "violated") + ", min eigenvalue/|I| " + num(worst_eig)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "gapdelay_acceptance";
    const fs::path out = root / "out", first = root / "first";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string cmd = std::string(GAPDELAY_BIN) + " reproduce-all --seed 1 --no-meta -o " + out.string() +
                            " > " + (root / "log.txt").string() + " 2>&1";
    double slowest = 0.0;
    for (int run = 0; run < 2; ++run) {
        const auto t0 = Clock::now();
        if (std::system(cmd.c_str()) != 0) return {false, "reproduce-all failed, see " + (root / "log.txt").string()};
        slowest = std::max(slowest, seconds_since(t0));
        if (run == 0) fs::rename(out, first);
    }
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::directory_iterator(first)) {
        ++files;
        const fs::path other = out / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differing;
    }
    std::size_t second_files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(out)) ++second_files;
    const bool ok = differing == 0 && files == second_files && files > 0 && slowest < 600.0;
    return {ok, std::to_string(files) + " files, " + std::to_string(differing) + " differ, slowest run " +
                    num(slowest) + " s"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"FIM oracle equivalence", fim_oracle},
        {"Schur consistency", schur_consistency},
        {"SNR scaling law", snr_scaling},
        {"aperture ordering", aperture_ordering},
        {"gap penalty", gap_penalty},
        {"oscillation scale", oscillation_scale},
        {"leakage minima", leakage_minima},
        {"single-path resolution anchors", resolution_anchors},
        {"recombination identity", recombination},
        {"peak offset regression", table_two},
        {"normalization and PSD", normalization_psd},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
