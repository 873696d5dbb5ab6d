#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cupcf {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input record (wrong column count, non-integer field, ...).
/// Carries the 1-based line number of the offending record.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Rating value outside the supported scale.
class RangeError : public Error {
public:
    using Error::Error;
    RangeError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what) {}
};

/// More than one rating for the same (user, item) pair.
class DuplicateError : public Error {
public:
    using Error::Error;
};

/// Requested statistic has no data to draw from (unknown user/item, empty set).
class NoDataError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (bad fold count, n = 0, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Active user absent from the training data.
class ColdUserError : public Error {
public:
    using Error::Error;
};

/// Caller broke an API contract (e.g. merging lists of different users).
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace cupcf
