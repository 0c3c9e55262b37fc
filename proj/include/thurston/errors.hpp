#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thurston {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. Carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// An operation would leave the supported term algebra (e.g. a squared log atom).
class ClosureError : public Error {
public:
    using Error::Error;
};

/// Wrong arguments: mismatched atom sets, dimensions, degenerate parameters.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A point outside the chart's admissible region.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace thurston
