#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pgmhd {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Level-adjacency or level-count violations.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A node or term that does not exist in the graph.
class LookupError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A conditional distribution with zero mass in its denominator.
class UndefinedDistribution : public Error {
public:
    using Error::Error;
};

/// Mutation attempted on a frozen graph.
class MutationError : public Error {
public:
    using Error::Error;
};

class CorruptionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace pgmhd
