#pragma once

#include <stdexcept>
#include <string>

namespace monotrace {

// Malformed or inconsistent input data (log files, manifests, configs).
// CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Log parse failure; carries the 1-based line number of the offending line.
class ParseError : public DataError {
public:
    ParseError(const std::string& msg, std::size_t line_no)
        : DataError(msg + " (line " + std::to_string(line_no) + ")"),
          line_no_(line_no) {}

    std::size_t line_no() const { return line_no_; }

private:
    std::size_t line_no_;
};

// Unreadable, corrupt, or version-incompatible model file.
// CLI maps this to exit code 3.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace monotrace
