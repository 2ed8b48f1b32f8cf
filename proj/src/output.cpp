#include "ammlab/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ammlab::output {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row() {
    rows_.emplace_back();
    rows_.back().reserve(columns_.size());
    return *this;
}

CsvTable& CsvTable::add(double v) { return add(std::string_view(format_double(v))); }

CsvTable& CsvTable::add(std::uint64_t v) { return add(std::string_view(std::to_string(v))); }

CsvTable& CsvTable::add(std::string_view v) {
    if (rows_.empty()) throw std::logic_error("CsvTable::add before row()");
    rows_.back().emplace_back(v);
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(columns_);
    for (const auto& r : rows_) {
        if (r.size() != columns_.size()) {
            throw std::logic_error("CSV row has " + std::to_string(r.size()) + " cells, expected " +
                                   std::to_string(columns_.size()));
        }
        emit(r);
    }
    return out;
}

Json histogram_json(const stats::Histogram& h) {
    Json j;
    j["edges"] = h.edges;
    j["counts"] = h.counts;
    j["n_total"] = h.n_total;
    j["moments"] = {{"mean", h.moments.mean},
                    {"variance", h.moments.variance},
                    {"skewness", h.moments.skewness}};
    return j;
}

Json fit_json(const stats::LinearFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr}};
}

std::string Bundle::manifest_text() const { return manifest.dump(2) + "\n"; }

void write_bundle(const Bundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&dir](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    };
    for (const auto& [name, content] : bundle.files) write(name, content);
    write("manifest.json", bundle.manifest_text());
}

}  // namespace ammlab::output
