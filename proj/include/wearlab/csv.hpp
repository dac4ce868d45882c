#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wearlab/common.hpp"

namespace wearlab {

// Minimal comma-separated reader for the fixed export schemas: UTF-8,
// '.' decimal separator, no quoting. Keeps 1-based line numbers so row
// errors can point at the offending line.
class CsvTable {
public:
    static CsvTable read_file(const std::string& path);
    static CsvTable from_string(const std::string& text, const std::string& name);

    const std::string& path() const { return path_; }
    const std::vector<std::string>& header() const { return header_; }
    size_t rows() const { return cells_.size(); }

    // Index of a required column; throws SchemaError naming the column.
    size_t column(const std::string& name) const;
    std::optional<size_t> find_column(const std::string& name) const;

    size_t line_of(size_t row) const { return lines_[row]; }
    const std::string& cell(size_t row, size_t col) const { return cells_[row][col]; }

    // Typed accessors. Empty cells yield nullopt; malformed cells throw
    // RowError with the file and line.
    std::optional<double> number(size_t row, size_t col) const;
    double required_number(size_t row, size_t col) const;
    std::string required_string(size_t row, size_t col) const;

    [[noreturn]] void fail(size_t row, const std::string& what) const {
        throw RowError(path_, lines_[row], what);
    }

private:
    std::string path_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, size_t> index_;
    std::vector<std::vector<std::string>> cells_;
    std::vector<size_t> lines_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace wearlab
