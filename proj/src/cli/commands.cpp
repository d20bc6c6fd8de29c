#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cli/output.hpp"
#include "gapdelay/errors.hpp"
#include "gapdelay/parallel.hpp"

namespace gapdelay::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string complex_text(cplx z) { return format_number(z.real()) + (z.imag() < 0 ? "" : "+") +
                                          format_number(z.imag()) + "j"; }

fs::path out_dir(const RunConfig& c) {
    return c.output_dir.empty() ? default_output_dir() : c.output_dir;
}

MetaLines mask_meta(const RunConfig& c, const std::string& scenario_id) {
    MetaLines m{{"scenario", scenario_id}, {"preset", c.preset}};
    if (c.preset == "flat-taper") m.emplace_back("taper_width_hz", format_number(c.taper_width_hz));
    m.emplace_back("delta_f_hz", format_number(c.delta_f_hz));
    m.emplace_back("phase_reference", c.phase_reference);
    return m;
}

void add_channel_meta(MetaLines& m, const TwoPathChannel& ch) {
    m.emplace_back("tau1_ns", format_number(ch.tau1_s * 1e9));
    m.emplace_back("tau2_ns", format_number(ch.tau2_s * 1e9));
    m.emplace_back("alpha1", complex_text(ch.alpha1));
    m.emplace_back("alpha2", complex_text(ch.alpha2));
}

/// Selected scenarios, each followed by its contiguous reference.
std::vector<Scenario> selected_variants(const RunConfig& c) {
    std::vector<Scenario> out;
    for (const Scenario& s : selected_scenarios(c)) {
        for (Scenario& v : scenario_variants(s)) {
            const bool seen = std::any_of(out.begin(), out.end(),
                                          [&](const Scenario& o) { return o.id == v.id; });
            if (!seen) out.push_back(std::move(v));
        }
    }
    return out;
}

SweepSettings sweep_settings(const RunConfig& c, const Scenario& s) {
    SweepSettings st;
    st.mask = mask_options(c);
    st.channel = channel_for(c, s);
    st.workers = c.workers;
    return st;
}

void write_crlb_curve(const fs::path& path, const RunConfig& c, const CrlbCurve& curve,
                      const TwoPathChannel& ch, const char* x_column, bool x_is_snr) {
    MetaLines meta = mask_meta(c, curve.variant_id);
    meta.emplace_back("reference", curve.is_reference ? "true" : "false");
    add_channel_meta(meta, ch);
    CsvWriter csv(path, meta, c.no_meta);
    csv.row(std::vector<std::string>{x_column, "sqrt_crlb_ns", "cond_i_aa", "cond_i_eff", "near_singular"});
    for (const CrlbResult& r : curve.rows) {
        const double x = x_is_snr ? r.snr_db : r.delta_tau_s * 1e9;
        csv.row(std::vector<std::string>{format_number(x), format_number(r.sqrt_crlb_ns()),
                                         format_number(r.cond_alpha_alpha), format_number(r.cond_eff),
                                         r.near_singular ? "1" : "0"});
    }
}

double recombination_deviation(const SpectralMask& mask, const DelayAxis& axis) {
    const SubbandResponse sr = subband_decomposition(mask, axis);
    const std::vector<cplx> g = single_path_response_complex(mask, axis.values());
    const double g0 = std::abs(single_path_response_complex(mask, std::vector<double>{0.0}).front());
    const std::vector<cplx> rec = sr.recombined();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(rec[i] - g[i] / g0));
    return worst;
}

void print_peak_table(std::ostream& os, const std::vector<PeakReport>& reports) {
    os << "id      tau_hat_1_ns  d_tau_1_ns  tau_hat_2_ns  d_tau_2_ns\n";
    for (const PeakReport& r : reports) {
        char line[128];
        std::snprintf(line, sizeof line, "%-6s  %12.3f  %+10.3f  %12.3f  %+10.3f\n", r.scenario_id.c_str(),
                      r.first.tau_hat_s * 1e9, r.first.offset_s * 1e9, r.second.tau_hat_s * 1e9,
                      r.second.offset_s * 1e9);
        os << line;
    }
}

std::vector<PeakReport> run_scans(const RunConfig& c, const std::vector<Scenario>& scenarios,
                                  bool noisy, const std::string& prefix, CommandStreams io) {
    const fs::path dir = out_dir(c);
    const DelayAxis axis = delay_axis(c);
    const double window_s = c.peak_window_ns * 1e-9;
    std::vector<PeakReport> reports;
    for (const Scenario& s : scenarios) {
        const TwoPathChannel ch = channel_for(c, s);
        const SpectralMask mask = build_mask(s, mask_options(c));
        MetaLines meta = mask_meta(c, s.id);
        add_channel_meta(meta, ch);

        DelayScan scan;
        if (noisy) {
            const ParamVector theta = ParamVector::from(ch);
            const double sigma2 = sigma_from_snr(theta, mask, c.snr_db);
            const std::uint64_t seed = scenario_seed(c.seed, s.id);
            scan = two_path_scan(observe(theta, mask, sigma2, seed), axis);
            meta.emplace_back("snr_db", format_number(c.snr_db));
            meta.emplace_back("sigma2", format_number(sigma2));
            meta.emplace_back("seed", std::to_string(seed));
        } else {
            scan = two_path_scan(mask, ch, axis);
            meta.emplace_back("sigma2", "0");
        }

        PeakReport report = extract_peaks(scan, ch, window_s);
        if (report.windows_overlap) {
            io.err << "warning: peak windows of " << s.id << " overlap (tau2 - tau1 = "
                   << ch.delta_tau_s() * 1e9 << " ns < 2 x " << c.peak_window_ns << " ns)\n";
        }
        reports.push_back(report);

        CsvWriter csv(dir / (prefix + file_stem(s.id) + ".csv"), meta, c.no_meta);
        csv.header({"tau_ns", "value"});
        for (std::size_t i = 0; i < axis.count; ++i) csv.row({axis.at(i) * 1e9, scan.values[i]});
        io.out << csv.path().string() << '\n';
    }
    return reports;
}

/// Short label for the selection, used to name aggregate outputs.
std::string selection_tag(const RunConfig& c) {
    std::string tag;
    for (const std::string& id : c.scenarios) tag += (tag.empty() ? "" : "-") + file_stem(id);
    if (c.scenarios.empty() && !c.group.empty()) tag = c.group;
    if (!c.custom_bands_hz.empty()) tag += (tag.empty() ? "" : "-") + file_stem(c.custom_id);
    return tag.empty() ? "all" : tag;
}

json peaks_json(const std::vector<PeakReport>& reports) {
    json arr = json::array();
    for (const PeakReport& r : reports) arr.push_back(peak_report_json(r));
    return arr;
}

}  // namespace

std::uint64_t scenario_seed(std::uint64_t base_seed, const std::string& scenario_id) {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (unsigned char ch : scenario_id) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return base_seed ^ h;
}

json scenario_json(const Scenario& s) {
    json bands = json::array();
    for (const Band& b : s.bands) bands.push_back({b.lo_hz, b.hi_hz});
    return {{"id", s.id},
            {"bands_hz", bands},
            {"aperture_hz", s.aperture_hz()},
            {"gap_hz", s.gap_hz()},
            {"reference_of", s.reference_of ? json(*s.reference_of) : json(nullptr)}};
}

json peak_report_json(const PeakReport& r) {
    return {{"id", r.scenario_id},
            {"tau_hat_1_ns", r.first.tau_hat_s * 1e9},
            {"d_tau_1_ns", r.first.offset_s * 1e9},
            {"tau_hat_2_ns", r.second.tau_hat_s * 1e9},
            {"d_tau_2_ns", r.second.offset_s * 1e9}};
}

void cmd_scenarios(const RunConfig& c, bool as_json, CommandStreams io) {
    std::vector<Scenario> list;
    if (c.scenarios.empty()) {
        list = scenario_catalog();
    } else {
        for (const std::string& id : c.scenarios) list.push_back(require_scenario(id));
    }
    if (as_json) {
        json arr = json::array();
        for (const Scenario& s : list) arr.push_back(scenario_json(s));
        io.out << arr.dump(2) << '\n';
        return;
    }
    io.out << "id    bands_ghz                      aperture_mhz  gap_mhz  reference_of\n";
    for (const Scenario& s : list) {
        std::string bands;
        for (const Band& b : s.bands) {
            if (!bands.empty()) bands += " + ";
            bands += "[" + fmt("%.2f", b.lo_hz * 1e-9) + ", " + fmt("%.2f", b.hi_hz * 1e-9) + "]";
        }
        char line[256];
        std::snprintf(line, sizeof line, "%-5s %-30s %12.0f  %7.0f  %s\n", s.id.c_str(), bands.c_str(),
                      s.aperture_hz() * 1e-6, s.gap_hz() * 1e-6,
                      s.reference_of ? s.reference_of->c_str() : "-");
        io.out << line;
    }
}

void cmd_mask(const RunConfig& c, CommandStreams io) {
    for (const Scenario& s : selected_variants(c)) {
        const SpectralMask mask = build_mask(s, mask_options(c));
        CsvWriter csv(out_dir(c) / ("mask_" + file_stem(s.id) + ".csv"), mask_meta(c, s.id), c.no_meta);
        csv.header({"n", "f_hz", "weight"});
        for (std::size_t n = 0; n < mask.grid.n_tones; ++n) {
            csv.row(std::vector<std::string>{std::to_string(n), format_number(mask.grid.frequency_hz(n)),
                                             format_number(mask.weights[n])});
        }
        io.out << csv.path().string() << '\n';
    }
}

void cmd_crlb(const RunConfig& c, CommandStreams io) {
    const fs::path dir = out_dir(c);
    for (const Scenario& s : selected_scenarios(c)) {
        const SweepSettings st = sweep_settings(c, s);
        if (c.sweep == "snr") {
            const std::vector<double> grid = snr_grid(c);
            for (double dtau_ns : c.dtau_ns) {
                TwoPathChannel ch = st.channel;
                ch.tau2_s = ch.tau1_s + dtau_ns * 1e-9;
                for (const CrlbCurve& curve : sweep_snr(s, st, dtau_ns * 1e-9, grid)) {
                    const fs::path path = dir / ("crlb_snr_dtau" + format_number(dtau_ns) + "ns_" +
                                                 file_stem(curve.variant_id) + ".csv");
                    write_crlb_curve(path, c, curve, ch, "snr_db", true);
                    io.out << path.string() << '\n';
                }
            }
        } else {
            const std::vector<double> grid = separation_grid_s(c);
            for (const CrlbCurve& curve : sweep_delta_tau(s, st, c.snr_db, grid)) {
                const fs::path path = dir / ("crlb_dtau_snr" + format_number(c.snr_db) + "dB_" +
                                             file_stem(curve.variant_id) + ".csv");
                write_crlb_curve(path, c, curve, st.channel, "dtau_ns", false);
                io.out << path.string() << '\n';
            }
        }
    }
}

void cmd_response(const RunConfig& c, CommandStreams io) {
    const DelayAxis axis = delay_axis(c);
    for (const Scenario& s : selected_variants(c)) {
        const SpectralMask mask = build_mask(s, mask_options(c));
        const DelayScan g = single_path_response(mask, axis, true);
        MetaLines meta = mask_meta(c, s.id);
        meta.emplace_back("normalized", "true");
        CsvWriter csv(out_dir(c) / ("response_" + file_stem(s.id) + ".csv"), meta, c.no_meta);
        csv.header({"tau_ns", "value"});
        for (std::size_t i = 0; i < axis.count; ++i) csv.row({axis.at(i) * 1e9, g.values[i]});
        io.out << csv.path().string() << '\n';
        if (c.recombination_check && mask.subbands.size() == 2) {
            io.out << "recombination " << s.id << " max_rel_dev=" << format_number(recombination_deviation(mask, axis))
                   << '\n';
        }
    }
}

void cmd_scan(const RunConfig& c, CommandStreams io) {
    const std::vector<Scenario> scenarios = selected_scenarios(c);
    const bool noisy = c.noise;
    const std::string prefix = noisy ? "scan_noisy_" : "scan_";
    const std::vector<PeakReport> reports = run_scans(c, scenarios, noisy, prefix, io);
    const fs::path path =
        out_dir(c) / ((noisy ? "peaks_noisy_" : "peaks_") + selection_tag(c) + ".json");
    write_json(path, peaks_json(reports));
    io.out << path.string() << '\n';
    print_peak_table(io.out, reports);
}

void cmd_leakage(const RunConfig& c, CommandStreams io) {
    const std::vector<double> grid = separation_grid_s(c);
    for (const Scenario& s : selected_scenarios(c)) {
        const SpectralMask mask = build_mask(s, mask_options(c));
        const SweepSettings st = sweep_settings(c, s);
        const LeakageCurve ell = leakage(mask, grid);
        std::vector<CrlbResult> bound(grid.size());
        parallel_for(
            grid.size(),
            [&](std::size_t i) {
                TwoPathChannel ch = st.channel;
                ch.tau2_s = ch.tau1_s + grid[i];
                bound[i] = crlb_at_snr(ParamVector::from(ch), mask, c.snr_db);
            },
            c.workers);

        MetaLines meta = mask_meta(c, s.id);
        add_channel_meta(meta, st.channel);
        meta.emplace_back("snr_db", format_number(c.snr_db));
        CsvWriter csv(out_dir(c) / ("leakage_" + file_stem(s.id) + ".csv"), meta, c.no_meta);
        csv.header({"dtau_ns", "sqrt_crlb_ns", "leakage"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            csv.row({grid[i] * 1e9, bound[i].sqrt_crlb_ns(), ell.level[i]});
        }
        io.out << csv.path().string() << '\n';
    }
}

void cmd_table2(const RunConfig& c, CommandStreams io) {
    std::vector<Scenario> six;
    for (const Scenario& s : scenario_catalog()) {
        if (!s.is_contiguous_reference()) six.push_back(s);
    }
    RunConfig noise_free = c;
    noise_free.noise = false;
    const std::vector<PeakReport> reports = run_scans(noise_free, six, false, "table2_scan_", io);

    const fs::path dir = out_dir(c);
    write_json(dir / "table2.json", peaks_json(reports));
    CsvWriter csv(dir / "table2.csv", {{"preset", c.preset}, {"peak_window_ns", format_number(c.peak_window_ns)}},
                  c.no_meta);
    csv.header({"id", "tau_hat_1_ns", "d_tau_1_ns", "tau_hat_2_ns", "d_tau_2_ns"});
    for (const PeakReport& r : reports) {
        csv.row(std::vector<std::string>{r.scenario_id, format_number(r.first.tau_hat_s * 1e9),
                                         format_number(r.first.offset_s * 1e9),
                                         format_number(r.second.tau_hat_s * 1e9),
                                         format_number(r.second.offset_s * 1e9)});
    }
    io.out << (dir / "table2.json").string() << '\n' << csv.path().string() << '\n';
    print_peak_table(io.out, reports);
}

void cmd_reproduce_all(const RunConfig& c, CommandStreams io) {
    const fs::path dir = out_dir(c);
    fs::create_directories(dir);
    RunConfig base = c;
    base.output_dir = dir;
    write_json(dir / "config.json", to_json(base));

    json catalog = json::array();
    for (const Scenario& s : scenario_catalog()) catalog.push_back(scenario_json(s));
    write_json(dir / "scenarios.json", catalog);

    for (const char* group : {"A", "B"}) {
        RunConfig g = base;
        g.scenarios.clear();
        g.custom_bands_hz.clear();
        g.group = group;

        cmd_mask(g, io);

        RunConfig snr = g;
        snr.sweep = "snr";
        snr.dtau_ns = {1.0, 10.0};
        cmd_crlb(snr, io);

        RunConfig dtau = g;
        dtau.sweep = "dtau";
        cmd_crlb(dtau, io);

        cmd_response(g, io);

        RunConfig noisy = g;
        noisy.noise = true;
        cmd_scan(noisy, io);

        RunConfig leak = g;
        leak.dtau_grid = {0.01, 50.0, 5000, "linear"};
        cmd_leakage(leak, io);
    }
    cmd_table2(base, io);
}

}  // namespace gapdelay::cli
