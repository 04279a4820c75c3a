// csv.cpp — CSV formatting

#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "qosc/errors.hpp"

namespace qosc::cli {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    meta_.emplace_back("schema", kCsvSchema);
}

void CsvTable::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }

void CsvTable::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) {
        throw std::logic_error("CsvTable: row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(columns_.size()));
    }
    rows_.push_back(cells);
}

void CsvTable::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
}

void CsvTable::write(std::ostream& out) const {
    for (const auto& [key, value] : meta_) out << "# " << key << ": " << value << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
}

void write_table(const CsvTable& table, const std::string& path) {
    if (path == "-") {
        table.write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    table.write(out);
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

} // namespace qosc::cli
