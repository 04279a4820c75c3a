// csv.hpp — versioned CSV output with a `#`-prefixed metadata header

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qosc::cli {

inline constexpr const char* kCsvSchema = "qosc-csv/1";

// 17 significant digits, "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void meta(const std::string& key, const std::string& value);
    // Appends a row; throws std::logic_error on a column-count mismatch.
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& values);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    std::size_t rows() const noexcept { return rows_.size(); }

    // Header lines in insertion order, then the column line, then rows.
    void write(std::ostream& out) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

// Writes to `path`, or to stdout for "-". Throws ConfigError when the file
// cannot be opened.
void write_table(const CsvTable& table, const std::string& path);

} // namespace qosc::cli
