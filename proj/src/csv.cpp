#include "wearlab/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace wearlab {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

CsvTable CsvTable::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str(), path);
}

CsvTable CsvTable::from_string(const std::string& text, const std::string& name) {
    CsvTable t;
    t.path_ = name;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (!have_header) {
            t.header_ = split_commas(line);
            for (size_t i = 0; i < t.header_.size(); ++i) t.index_.emplace(t.header_[i], i);
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto cells = split_commas(line);
        if (cells.size() != t.header_.size()) {
            throw RowError(name, lineno,
                           "expected " + std::to_string(t.header_.size()) + " columns, got " +
                               std::to_string(cells.size()));
        }
        t.cells_.push_back(std::move(cells));
        t.lines_.push_back(lineno);
    }
    if (!have_header) throw SchemaError(name + ": empty file (missing header)");
    return t;
}

size_t CsvTable::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw SchemaError(path_ + ": missing column '" + name + "'");
    return it->second;
}

std::optional<size_t> CsvTable::find_column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> CsvTable::number(size_t row, size_t col) const {
    const std::string& s = cells_[row][col];
    if (s.empty()) return std::nullopt;
    double v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        fail(row, "not a number in column '" + header_[col] + "': '" + s + "'");
    }
    return v;
}

double CsvTable::required_number(size_t row, size_t col) const {
    auto v = number(row, col);
    if (!v) fail(row, "empty value in required column '" + header_[col] + "'");
    return *v;
}

std::string CsvTable::required_string(size_t row, size_t col) const {
    const std::string& s = cells_[row][col];
    if (s.empty()) fail(row, "empty value in required column '" + header_[col] + "'");
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write file: " + path);
    out << content;
    if (!out) throw SchemaError("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace wearlab
