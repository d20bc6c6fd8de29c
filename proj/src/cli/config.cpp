#include "cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "gapdelay/errors.hpp"

namespace gapdelay::cli {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config field '") + key + "': " + e.what());
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw InvalidInput(std::string(what) + " must be finite");
}

char group_of(const std::string& id) { return id.empty() ? '\0' : id.front(); }

}  // namespace

json to_json(const RunConfig& c) {
    json bands = json::array();
    for (const Band& b : c.custom_bands_hz) bands.push_back({b.lo_hz, b.hi_hz});
    json j;
    j["scenarios"] = c.scenarios;
    j["group"] = c.group;
    j["custom_id"] = c.custom_id;
    j["custom_bands_hz"] = bands;
    j["preset"] = c.preset;
    j["taper_width_hz"] = c.taper_width_hz;
    j["delta_f_hz"] = c.delta_f_hz;
    j["phase_reference"] = c.phase_reference;
    j["channel"] = {
        {"tau1_ns", c.tau1_ns ? json(*c.tau1_ns) : json(nullptr)},
        {"tau2_ns", c.tau2_ns ? json(*c.tau2_ns) : json(nullptr)},
        {"alpha1_re", c.alpha1_re},
        {"alpha1_im", c.alpha1_im},
        {"alpha2_re", c.alpha2_re},
        {"alpha2_im", c.alpha2_im},
    };
    j["sweep"] = c.sweep;
    j["snr_db"] = c.snr_db;
    j["dtau_ns"] = c.dtau_ns;
    j["snr_grid"] = {{"start", c.snr_grid.start}, {"stop", c.snr_grid.stop}, {"step", c.snr_grid.step}};
    j["dtau_grid"] = {{"min_ns", c.dtau_grid.min_ns},
                      {"max_ns", c.dtau_grid.max_ns},
                      {"points", c.dtau_grid.points},
                      {"spacing", c.dtau_grid.spacing}};
    j["delay_axis"] = {{"start_ns", c.delay_axis.start_ns},
                       {"stop_ns", c.delay_axis.stop_ns},
                       {"step_ns", c.delay_axis.step_ns}};
    j["peak_window_ns"] = c.peak_window_ns;
    j["noise"] = c.noise;
    j["seed"] = c.seed;
    j["recombination_check"] = c.recombination_check;
    j["output_dir"] = c.output_dir.string();
    j["no_meta"] = c.no_meta;
    j["threads"] = c.workers;
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("config must be a JSON object");
    RunConfig c;
    read_field(j, "scenarios", c.scenarios);
    read_field(j, "group", c.group);
    read_field(j, "custom_id", c.custom_id);
    if (j.contains("custom_bands_hz")) {
        std::vector<std::array<double, 2>> bands;
        read_field(j, "custom_bands_hz", bands);
        for (const auto& b : bands) c.custom_bands_hz.push_back({b[0], b[1]});
    }
    read_field(j, "preset", c.preset);
    read_field(j, "taper_width_hz", c.taper_width_hz);
    read_field(j, "delta_f_hz", c.delta_f_hz);
    read_field(j, "phase_reference", c.phase_reference);
    if (j.contains("channel")) {
        const json& ch = j.at("channel");
        for (auto [key, slot] : {std::pair{"tau1_ns", &c.tau1_ns}, {"tau2_ns", &c.tau2_ns}}) {
            if (!ch.contains(key) || ch.at(key).is_null()) continue;
            double v = 0.0;
            read_field(ch, key, v);
            *slot = v;
        }
        read_field(ch, "alpha1_re", c.alpha1_re);
        read_field(ch, "alpha1_im", c.alpha1_im);
        read_field(ch, "alpha2_re", c.alpha2_re);
        read_field(ch, "alpha2_im", c.alpha2_im);
    }
    read_field(j, "sweep", c.sweep);
    read_field(j, "snr_db", c.snr_db);
    read_field(j, "dtau_ns", c.dtau_ns);
    if (j.contains("snr_grid")) {
        const json& g = j.at("snr_grid");
        read_field(g, "start", c.snr_grid.start);
        read_field(g, "stop", c.snr_grid.stop);
        read_field(g, "step", c.snr_grid.step);
    }
    if (j.contains("dtau_grid")) {
        const json& g = j.at("dtau_grid");
        read_field(g, "min_ns", c.dtau_grid.min_ns);
        read_field(g, "max_ns", c.dtau_grid.max_ns);
        read_field(g, "points", c.dtau_grid.points);
        read_field(g, "spacing", c.dtau_grid.spacing);
    }
    if (j.contains("delay_axis")) {
        const json& g = j.at("delay_axis");
        read_field(g, "start_ns", c.delay_axis.start_ns);
        read_field(g, "stop_ns", c.delay_axis.stop_ns);
        read_field(g, "step_ns", c.delay_axis.step_ns);
    }
    read_field(j, "peak_window_ns", c.peak_window_ns);
    read_field(j, "noise", c.noise);
    read_field(j, "seed", c.seed);
    read_field(j, "recombination_check", c.recombination_check);
    std::string out;
    read_field(j, "output_dir", out);
    c.output_dir = out;
    read_field(j, "no_meta", c.no_meta);
    read_field(j, "threads", c.workers);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("GAPDELAY_OUTPUT_DIR"); env && *env) return env;
    return "gapdelay-out";
}

void validate(const RunConfig& c) {
    if (!c.group.empty() && c.group != "A" && c.group != "B") {
        throw InvalidInput("group must be A or B, got '" + c.group + "'");
    }
    for (const std::string& id : c.scenarios) require_scenario(id);
    if (!c.custom_bands_hz.empty()) make_scenario(c.custom_id, c.custom_bands_hz);
    MaskShaping::parse(c.preset, c.taper_width_hz);
    parse_phase_reference(c.phase_reference);
    if (!(c.delta_f_hz > 0.0) || !std::isfinite(c.delta_f_hz)) {
        throw InvalidInput("delta_f_hz must be positive");
    }
    for (double v : {c.alpha1_re, c.alpha1_im, c.alpha2_re, c.alpha2_im}) require_finite(v, "path gains");
    if (c.tau1_ns) require_finite(*c.tau1_ns, "tau1_ns");
    if (c.tau2_ns) require_finite(*c.tau2_ns, "tau2_ns");
    if (c.sweep != "snr" && c.sweep != "dtau") {
        throw InvalidInput("sweep must be 'snr' or 'dtau', got '" + c.sweep + "'");
    }
    require_finite(c.snr_db, "snr_db");
    if (c.dtau_ns.empty()) throw InvalidInput("dtau list is empty");
    for (double d : c.dtau_ns) {
        if (!(d > 0.0) || !std::isfinite(d)) throw InvalidInput("separations must be positive");
    }
    snr_grid(c);
    separation_grid_s(c);
    delay_axis(c);
    if (!(c.peak_window_ns > 0.0)) throw InvalidInput("peak_window_ns must be positive");
}

std::vector<Scenario> selected_scenarios(const RunConfig& c) {
    std::vector<Scenario> out;
    for (const std::string& id : c.scenarios) out.push_back(require_scenario(id));
    if (c.scenarios.empty() && !c.group.empty()) {
        for (const Scenario& s : scenario_catalog()) {
            if (group_of(s.id) == c.group.front() && !s.is_contiguous_reference()) out.push_back(s);
        }
    }
    if (!c.custom_bands_hz.empty()) out.push_back(make_scenario(c.custom_id, c.custom_bands_hz));
    if (out.empty()) {
        for (const Scenario& s : scenario_catalog()) {
            if (!s.is_contiguous_reference()) out.push_back(s);
        }
    }
    return out;
}

MaskOptions mask_options(const RunConfig& c) {
    MaskOptions o;
    o.shaping = MaskShaping::parse(c.preset, c.taper_width_hz);
    o.delta_f_hz = c.delta_f_hz;
    o.phase_reference = parse_phase_reference(c.phase_reference);
    return o;
}

TwoPathChannel channel_for(const RunConfig& c, const Scenario& scenario) {
    const double default_tau2 = group_of(scenario.id) == 'B' ? 10.0 : 15.0;
    TwoPathChannel ch;
    ch.tau1_s = c.tau1_ns.value_or(5.0) * 1e-9;
    ch.tau2_s = c.tau2_ns.value_or(default_tau2) * 1e-9;
    ch.alpha1 = {c.alpha1_re, c.alpha1_im};
    ch.alpha2 = {c.alpha2_re, c.alpha2_im};
    ch.validate();
    return ch;
}

std::vector<double> snr_grid(const RunConfig& c) {
    const auto& g = c.snr_grid;
    if (!std::isfinite(g.start) || !std::isfinite(g.stop) || !(g.step > 0.0) || g.stop < g.start) {
        throw InvalidInput("SNR grid needs finite start <= stop and step > 0");
    }
    return linear_grid(g.start, g.stop, g.step);
}

std::vector<double> separation_grid_s(const RunConfig& c) {
    const auto& g = c.dtau_grid;
    if (g.points == 0) throw InvalidInput("separation grid is empty");
    if (!(g.min_ns > 0.0) || !(g.max_ns > g.min_ns) || !std::isfinite(g.max_ns)) {
        throw InvalidInput("separation grid needs 0 < min_ns < max_ns");
    }
    std::vector<double> ns;
    if (g.spacing == "log") {
        ns = log_grid(g.min_ns, g.max_ns, g.points);
    } else if (g.spacing == "linear") {
        if (g.points < 2) throw InvalidInput("linear separation grid needs >= 2 points");
        ns.resize(g.points);
        const double step = (g.max_ns - g.min_ns) / static_cast<double>(g.points - 1);
        for (std::size_t i = 0; i < g.points; ++i) ns[i] = g.min_ns + static_cast<double>(i) * step;
        ns.back() = g.max_ns;
    } else {
        throw InvalidInput("dtau_grid.spacing must be 'log' or 'linear', got '" + g.spacing + "'");
    }
    for (double& v : ns) v *= 1e-9;
    return ns;
}

DelayAxis delay_axis(const RunConfig& c) {
    const auto& a = c.delay_axis;
    if (!(a.start_ns >= 0.0)) throw InvalidInput("delay axis must start at >= 0 ns");
    return DelayAxis::range(a.start_ns * 1e-9, a.stop_ns * 1e-9, a.step_ns * 1e-9);
}

}  // namespace gapdelay::cli
