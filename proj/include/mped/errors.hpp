#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mped {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed graph input: self-loops, duplicate edges, cycles, out-of-range nodes.
class GraphError : public Error {
public:
    using Error::Error;
};

/// A parameter outside its documented range (e.g. q > floor(p/2) for agnostic systems).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The partially directed graph does not describe the supplied DAG.
class PatternMismatch : public Error {
public:
    using Error::Error;
};

/// An enumeration would exceed its configured size cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Rejection sampling ran out of attempts.
class RetryExhausted : public Error {
public:
    using Error::Error;
};

/// Malformed experiment configuration or command-line options.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string &what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace mped
