#pragma once

// CSV/JSON writers. Numbers use 17 significant digits, LF line endings.
// Comment lines start with '#'; the generated-at line is omitted with no_meta.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gapdelay::cli {

std::string format_number(double v);

/// "A2*" -> "A2star", safe for file names.
std::string file_stem(const std::string& scenario_id);

using MetaLines = std::vector<std::pair<std::string, std::string>>;

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const MetaLines& meta, bool no_meta);

    void header(std::initializer_list<const char*> columns);
    void row(std::initializer_list<double> values);
    void row(const std::vector<std::string>& cells);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

std::string utc_timestamp();

}  // namespace gapdelay::cli
