#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deanon {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Out-of-domain scalar parameter (probability outside its range, a <= 0, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RangeError : public Error {
public:
    using Error::Error;
};

// Exhaustive oracles refuse sizes whose factorial cost is out of reach.
class CapacityError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require_dims(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace deanon
