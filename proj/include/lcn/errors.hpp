#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcn {

// Bad arguments (dimension mismatch, lambda out of range, ...) are reported
// with std::invalid_argument. The types below cover the remaining failure modes.

/// A malformed input file. `line()` is 1-based; 0 when the whole file is at fault.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) +
                             ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A caller broke an operation's precondition, e.g. stepped with a masked action.
class ContractViolation : public std::logic_error {
    using std::logic_error::logic_error;
};

/// The training loss became NaN or infinite.
class TrainingDiverged : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A configuration file failed validation.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lcn
