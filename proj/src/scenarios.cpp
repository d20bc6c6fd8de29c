#include <algorithm>
#include <cmath>

#include "gapdelay/errors.hpp"
#include "gapdelay/spectrum.hpp"

namespace gapdelay {

namespace {

constexpr double GHz = 1e9;

Scenario catalog_entry(std::string id, std::vector<Band> bands,
                       std::optional<std::string> reference_of = std::nullopt) {
    Scenario s = make_scenario(std::move(id), std::move(bands));
    s.reference_of = std::move(reference_of);
    return s;
}

}  // namespace

double Scenario::aperture_hz() const {
    if (bands.empty()) return 0.0;
    return bands.back().hi_hz - bands.front().lo_hz;
}

double Scenario::gap_hz() const {
    double gap = 0.0;
    for (std::size_t i = 1; i < bands.size(); ++i) gap += bands[i].lo_hz - bands[i - 1].hi_hz;
    return gap;
}

Scenario make_scenario(std::string id, std::vector<Band> bands) {
    if (id.empty()) throw InvalidInput("scenario id must not be empty");
    if (bands.empty()) throw InvalidInput("scenario '" + id + "' has no bands");
    for (const Band& b : bands) {
        if (!std::isfinite(b.lo_hz) || !std::isfinite(b.hi_hz) || b.lo_hz <= 0.0 ||
            !(b.lo_hz < b.hi_hz)) {
            throw InvalidInput("scenario '" + id + "' has an invalid band");
        }
    }
    for (std::size_t i = 1; i < bands.size(); ++i) {
        if (bands[i].lo_hz < bands[i - 1].hi_hz) {
            throw InvalidInput("scenario '" + id + "' bands overlap or are not sorted");
        }
    }
    return Scenario{std::move(id), std::move(bands), std::nullopt};
}

const std::vector<Scenario>& scenario_catalog() {
    static const std::vector<Scenario> catalog = [] {
        std::vector<Scenario> c;
        c.push_back(catalog_entry("A1", {{5.17 * GHz, 5.33 * GHz}}));
        c.push_back(catalog_entry("A2", {{5.25 * GHz, 5.33 * GHz}, {5.49 * GHz, 5.57 * GHz}}));
        c.push_back(catalog_entry("A3", {{5.49 * GHz, 5.57 * GHz}, {5.97 * GHz, 6.05 * GHz}}));
        c.push_back(catalog_entry("B1", {{5.97 * GHz, 6.13 * GHz}, {6.13 * GHz, 6.29 * GHz}}));
        c.push_back(catalog_entry("B2", {{5.17 * GHz, 5.33 * GHz}, {5.49 * GHz, 5.65 * GHz}}));
        c.push_back(catalog_entry("B3", {{5.49 * GHz, 5.65 * GHz}, {5.97 * GHz, 6.13 * GHz}}));
        c.push_back(catalog_entry("A2*", {{5.25 * GHz, 5.57 * GHz}}, "A2"));
        c.push_back(catalog_entry("A3*", {{5.49 * GHz, 6.05 * GHz}}, "A3"));
        c.push_back(catalog_entry("B2*", {{5.17 * GHz, 5.65 * GHz}}, "B2"));
        c.push_back(catalog_entry("B3*", {{5.49 * GHz, 6.13 * GHz}}, "B3"));
        return c;
    }();
    return catalog;
}

std::optional<Scenario> find_scenario(std::string_view id) {
    const auto& c = scenario_catalog();
    auto it = std::find_if(c.begin(), c.end(), [&](const Scenario& s) { return s.id == id; });
    if (it == c.end()) return std::nullopt;
    return *it;
}

Scenario require_scenario(std::string_view id) {
    auto s = find_scenario(id);
    if (!s) throw InvalidInput("unknown scenario id '" + std::string(id) + "'");
    return *s;
}

std::vector<std::string> group_variants(std::string_view group) {
    if (group != "A" && group != "B") {
        throw InvalidInput("unknown scenario group '" + std::string(group) + "'");
    }
    std::vector<std::string> ids;
    const auto& c = scenario_catalog();
    for (const Scenario& s : c) {
        if (s.is_contiguous_reference() || s.id.substr(0, 1) != group) continue;
        ids.push_back(s.id);
        for (const Scenario& r : c) {
            if (r.reference_of == s.id) ids.push_back(r.id);
        }
    }
    return ids;
}

ContiguousReference contiguous_reference(const Scenario& scenario) {
    if (scenario.bands.size() <= 1 || scenario.gap_hz() == 0.0) {
        return {scenario, true};
    }
    Scenario ref = make_scenario(scenario.id + "*",
                                 {{scenario.bands.front().lo_hz, scenario.bands.back().hi_hz}});
    ref.reference_of = scenario.id;
    return {std::move(ref), false};
}

}  // namespace gapdelay
