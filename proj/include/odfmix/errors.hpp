#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace odfmix {

/// A value outside the range covered by a table or model, e.g. a scale
/// parameter above the normalizer table's lambda_max.
class RangeError : public std::out_of_range {
public:
    RangeError(std::string what, int coordinate = -1, double value = 0.0)
        : std::out_of_range(std::move(what)), coordinate_(coordinate), value_(value) {}
    int coordinate() const { return coordinate_; }
    double value() const { return value_; }

private:
    int coordinate_;
    double value_;
};

class CatalogError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string what, std::size_t line = 0)
        : std::runtime_error(std::move(what)), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A file that cannot be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid run configuration; carries every problem found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

}  // namespace odfmix
