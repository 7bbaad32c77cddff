#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace easic {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A netlist that breaks a structural invariant (driver uniqueness, acyclicity, arity...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad library configuration, bitstream file, or command-line setup.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Something that must never happen did (e.g. a decomposed network disagreeing with its mask).
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace easic
