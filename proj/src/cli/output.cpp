#include "cli/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "gapdelay/errors.hpp"

namespace gapdelay::cli {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string file_stem(const std::string& scenario_id) {
    std::string s;
    for (char c : scenario_id) s += c == '*' ? std::string("star") : std::string(1, c);
    return s;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const MetaLines& meta, bool no_meta)
    : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw InvalidInput("cannot write " + path.string());
    for (const auto& [key, value] : meta) out_ << "# " << key << '=' << value << '\n';
    if (!no_meta) out_ << "# generated=" << utc_timestamp() << '\n';
}

void CsvWriter::header(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
        if (!first) out_ << ',';
        out_ << c;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out_ << ',';
        out_ << format_number(v);
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace gapdelay::cli
