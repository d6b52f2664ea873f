#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gp2 {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column),
          detail_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

class SignatureError : public Error {
public:
    using Error::Error;
};

// An enumeration or allocation would exceed a configured cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

// The solver ran out of its node budget before reaching a verdict.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

// An external backend crashed, timed out, or violated the answer protocol.
class SolverFailure : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace gp2
