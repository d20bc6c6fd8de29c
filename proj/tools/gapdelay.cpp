// gapdelay: multiband Wi-Fi delay-resolution toolkit.
//
// Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

#include <algorithm>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "gapdelay/errors.hpp"
#include "gapdelay/parallel.hpp"

namespace {

using gapdelay::cli::RunConfig;
using Apply = std::function<void(RunConfig&)>;

/// Collects flag values and applies only the flags that were given, after
/// the config file has been loaded.
class Overrides {
public:
    template <typename T, typename Fn>
    CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, Fn apply) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, help);
        appliers_.push_back([opt, value, apply](RunConfig& c) {
            if (opt->count() > 0) apply(c, *value);
        });
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& help,
                      std::function<void(RunConfig&)> apply) {
        CLI::Option* opt = app->add_flag(name, help);
        appliers_.push_back([opt, apply](RunConfig& c) {
            if (opt->count() > 0) apply(c);
        });
        return opt;
    }

    void apply(RunConfig& c) const {
        for (const Apply& a : appliers_) a(c);
    }

private:
    std::vector<Apply> appliers_;
};

/// "1ns", "2.5 ns" or "1" -> 1.0; used for separations and delays.
double parse_ns(std::string text) {
    while (!text.empty() && text.back() == ' ') text.pop_back();
    if (text.size() > 2 && text.compare(text.size() - 2, 2, "ns") == 0) text.resize(text.size() - 2);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < text.size() && text[used] == ' ') ++used;
    if (used == 0 || used != text.size()) throw gapdelay::InvalidInput("not a delay in ns: '" + text + "'");
    return v;
}

/// "lo:hi[,lo:hi...]" in Hz.
std::vector<gapdelay::Band> parse_bands(const std::string& text) {
    std::vector<gapdelay::Band> bands;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos) throw gapdelay::InvalidInput("band '" + item + "' is not lo:hi");
        try {
            bands.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw gapdelay::InvalidInput("band '" + item + "' is not lo:hi in Hz");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return bands;
}

std::vector<double> split_numbers(const std::string& text, char sep, std::size_t min_n, std::size_t max_n,
                                  const char* what) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = text.find(sep, pos);
        const std::string item = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw gapdelay::InvalidInput(std::string("malformed ") + what + ": '" + text + "'");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (v.size() < min_n || v.size() > max_n) {
        throw gapdelay::InvalidInput(std::string("malformed ") + what + ": '" + text + "'");
    }
    return v;
}

void add_common(CLI::App* app, Overrides& o) {
    o.add<std::vector<std::string>>(app, "--scenario,-s", "Catalog id (repeatable), e.g. A2 or B3*",
                                    [](RunConfig& c, const std::vector<std::string>& v) { c.scenarios = v; });
    o.add<std::string>(app, "--group,-g", "Scenario group A or B",
                       [](RunConfig& c, const std::string& v) { c.group = v; });
    o.add<std::string>(app, "--bands", "Custom bands lo:hi[,lo:hi...] in Hz",
                       [](RunConfig& c, const std::string& v) { c.custom_bands_hz = parse_bands(v); });
    o.add<std::string>(app, "--custom-id", "Id for --bands (default custom)",
                       [](RunConfig& c, const std::string& v) { c.custom_id = v; });
    o.add<std::string>(app, "--preset", "flat | flat-taper | toneplan-11ax",
                       [](RunConfig& c, const std::string& v) { c.preset = v; });
    o.add<double>(app, "--taper-width", "Edge taper width for flat-taper (Hz)",
                  [](RunConfig& c, double v) { c.taper_width_hz = v; });
    o.add<double>(app, "--delta-f", "Tone spacing (Hz)", [](RunConfig& c, double v) { c.delta_f_hz = v; });
    o.add<std::string>(app, "--phase-reference", "aperture-center | absolute",
                       [](RunConfig& c, const std::string& v) { c.phase_reference = v; });
    o.add<std::string>(app, "--tau1", "First path delay (ns)",
                       [](RunConfig& c, const std::string& v) { c.tau1_ns = parse_ns(v); });
    o.add<std::string>(app, "--tau2", "Second path delay (ns)",
                       [](RunConfig& c, const std::string& v) { c.tau2_ns = parse_ns(v); });
    o.add<std::string>(app, "--alpha1", "First path gain re,im", [](RunConfig& c, const std::string& v) {
        const auto z = split_numbers(v, ',', 2, 2, "gain");
        c.alpha1_re = z[0];
        c.alpha1_im = z[1];
    });
    o.add<std::string>(app, "--alpha2", "Second path gain re,im", [](RunConfig& c, const std::string& v) {
        const auto z = split_numbers(v, ',', 2, 2, "gain");
        c.alpha2_re = z[0];
        c.alpha2_im = z[1];
    });
    o.add<std::string>(app, "--axis", "Delay axis start:stop:step in ns", [](RunConfig& c, const std::string& v) {
        const auto a = split_numbers(v, ':', 3, 3, "delay axis");
        c.delay_axis = {a[0], a[1], a[2]};
    });
    o.add<std::string>(app, "--out,-o", "Output directory (default $GAPDELAY_OUTPUT_DIR or ./gapdelay-out)",
                       [](RunConfig& c, const std::string& v) { c.output_dir = v; });
    o.flag(app, "--no-meta", "Omit the timestamp comment line", [](RunConfig& c) { c.no_meta = true; });
    o.add<unsigned>(app, "--threads,-j", "Worker threads (0 = all cores)",
                    [](RunConfig& c, unsigned v) { c.workers = v; });
}

void add_snr(CLI::App* app, Overrides& o) {
    o.add<double>(app, "--snr", "SNR in dB", [](RunConfig& c, double v) { c.snr_db = v; });
}

void add_dtau_grid(CLI::App* app, Overrides& o) {
    o.add<std::string>(app, "--dtau-grid", "Separation grid min:max:points[:log|linear] in ns",
                       [](RunConfig& c, const std::string& v) {
                           std::string spacing = "log";
                           std::string head = v;
                           const std::size_t n = std::count(v.begin(), v.end(), ':');
                           if (n == 3) {
                               spacing = v.substr(v.rfind(':') + 1);
                               head = v.substr(0, v.rfind(':'));
                           }
                           const auto g = split_numbers(head, ':', 3, 3, "separation grid");
                           if (!(g[2] >= 0.0) || g[2] != static_cast<double>(static_cast<std::size_t>(g[2]))) {
                               throw gapdelay::InvalidInput("separation grid point count must be a whole number");
                           }
                           c.dtau_grid = {g[0], g[1], static_cast<std::size_t>(g[2]), spacing};
                       });
}

int fail(const char* kind, const std::exception& e, int code) {
    std::cerr << "gapdelay: " << kind << ": " << e.what() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay resolution of non-contiguous Wi-Fi multiband spectrum"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "gapdelay 1.0.0");
    std::string config_path;
    app.add_option("--config,-c", config_path, "JSON run configuration; flags override its fields")
        ->check(CLI::ExistingFile);

    Overrides o;

    bool as_json = false;
    auto* scenarios = app.add_subcommand("scenarios", "List the scenario catalog");
    scenarios->add_flag("--json", as_json, "Emit the catalog as JSON");
    o.add<std::vector<std::string>>(scenarios, "ids", "Only these ids",
                                    [](RunConfig& c, const std::vector<std::string>& v) { c.scenarios = v; });

    auto* mask = app.add_subcommand("mask", "Export spectral masks as CSV");
    add_common(mask, o);

    auto* crlb = app.add_subcommand("crlb", "Square-root CRLB of the delay separation");
    add_common(crlb, o);
    add_snr(crlb, o);
    add_dtau_grid(crlb, o);
    o.add<std::string>(crlb, "--sweep", "snr | dtau", [](RunConfig& c, const std::string& v) { c.sweep = v; })
        ->check(CLI::IsMember({"snr", "dtau"}));
    o.add<std::vector<std::string>>(crlb, "--dtau", "Separation(s) for --sweep snr, e.g. 1ns",
                                    [](RunConfig& c, const std::vector<std::string>& v) {
                                        c.dtau_ns.clear();
                                        for (const auto& s : v) c.dtau_ns.push_back(parse_ns(s));
                                    });
    o.add<std::string>(crlb, "--snr-grid", "SNR grid start:stop:step in dB", [](RunConfig& c, const std::string& v) {
        const auto g = split_numbers(v, ':', 3, 3, "SNR grid");
        c.snr_grid = {g[0], g[1], g[2]};
    });

    auto* response = app.add_subcommand("response", "Normalized single-path delay response");
    add_common(response, o);
    o.flag(response, "--recombination-check", "Report max deviation of the subband recombination",
           [](RunConfig& c) { c.recombination_check = true; });

    auto* scan = app.add_subcommand("scan", "Two-path delay scans and restricted peaks");
    add_common(scan, o);
    add_snr(scan, o);
    o.flag(scan, "--noise", "Seeded noisy observation at --snr", [](RunConfig& c) { c.noise = true; });
    o.flag(scan, "--noise-free", "Noise-free scan (default)", [](RunConfig& c) { c.noise = false; });
    o.add<std::uint64_t>(scan, "--seed", "Noise seed", [](RunConfig& c, std::uint64_t v) { c.seed = v; });
    o.add<double>(scan, "--window", "Peak search half-width (ns)",
                  [](RunConfig& c, double v) { c.peak_window_ns = v; });

    auto* leak = app.add_subcommand("leakage", "Leakage level joined with the CRLB versus separation");
    add_common(leak, o);
    add_snr(leak, o);
    add_dtau_grid(leak, o);

    auto* table2 = app.add_subcommand("table2", "Noise-free peak offsets for the six scenarios");
    add_common(table2, o);
    o.add<double>(table2, "--window", "Peak search half-width (ns)",
                  [](RunConfig& c, double v) { c.peak_window_ns = v; });

    auto* all = app.add_subcommand("reproduce-all", "Every table and figure family into one directory");
    add_common(all, o);
    add_snr(all, o);
    o.add<std::uint64_t>(all, "--seed", "Noise seed", [](RunConfig& c, std::uint64_t v) { c.seed = v; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : gapdelay::cli::load_config(config_path);
        o.apply(config);
        gapdelay::cli::validate(config);
        gapdelay::set_default_workers(config.workers);
        const gapdelay::cli::CommandStreams io{std::cout, std::cerr};

        if (*scenarios) gapdelay::cli::cmd_scenarios(config, as_json, io);
        else if (*mask) gapdelay::cli::cmd_mask(config, io);
        else if (*crlb) gapdelay::cli::cmd_crlb(config, io);
        else if (*response) gapdelay::cli::cmd_response(config, io);
        else if (*scan) gapdelay::cli::cmd_scan(config, io);
        else if (*leak) gapdelay::cli::cmd_leakage(config, io);
        else if (*table2) gapdelay::cli::cmd_table2(config, io);
        else if (*all) gapdelay::cli::cmd_reproduce_all(config, io);
        std::cout.flush();
        if (!std::cout) return 3;
    } catch (const gapdelay::InvalidInput& e) {
        return fail("error", e, 2);
    } catch (const gapdelay::NumericalError& e) {
        return fail("numerical failure", e, 3);
    } catch (const std::exception& e) {
        return fail("error", e, 3);
    }
    return 0;
}
