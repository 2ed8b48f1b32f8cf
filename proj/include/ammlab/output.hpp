#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ammlab/stats.hpp"

namespace ammlab::output {

using Json = nlohmann::ordered_json;

// 17 significant digits, '.' decimal separator; "nan" / "inf" / "-inf" for
// non-finite values.
std::string format_double(double v);

// Comma-separated table with a fixed header. Cells are emitted verbatim.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const noexcept { return columns_; }

    // Starts a new row; cells are appended with add().
    CsvTable& row();
    CsvTable& add(double v);
    CsvTable& add(std::uint64_t v);
    CsvTable& add(std::string_view v);

    // Throws std::logic_error if any row has the wrong number of cells.
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

Json histogram_json(const stats::Histogram& h);
Json fit_json(const stats::LinearFit& f);

// Files of one command invocation, keyed by file name. The manifest is
// rendered into manifest.json by write_bundle.
struct Bundle {
    Json manifest;
    std::map<std::string, std::string> files;

    std::string manifest_text() const;
};

// Writes every file plus manifest.json into `dir`, creating it if needed.
void write_bundle(const Bundle& bundle, const std::filesystem::path& dir);

}  // namespace ammlab::output
