#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wearlab {

// Missing values travel as quiet NaN; every aggregate decides explicitly
// what to do with them.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Base class for everything the library throws on bad input.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file structure: wrong header, missing column, missing file.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

// A specific row failed to parse or violates a field bound.
class RowError : public Error {
public:
    RowError(const std::string& file, size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file_(file), line_(line) {}
    const std::string& file() const { return file_; }
    size_t line() const { return line_; }

private:
    std::string file_;
    size_t line_;
};

// Operation called outside its domain (empty class, non-positive input, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

}  // namespace wearlab
