#pragma once

#include <exception>
#include <string>
#include <utility>

namespace txlife {

/// Base class for all library errors. The CLI maps subclasses to exit codes:
/// data/validation errors exit 2, numerical failures exit 3.
class Error : public std::exception {
public:
    explicit Error(std::string message) : message_(std::move(message)) {}

    const char* what() const noexcept override { return message_.c_str(); }

    /// Prepends "<context>: " to the message (used to tag pipeline stages).
    void add_context(const std::string& context) {
        message_ = context + ": " + message_;
    }

private:
    std::string message_;
};

/// A value violates a precondition (negative load, non-finite temperature, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Series or matrix dimensions disagree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An operation that needs at least one element received none.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// A text file could not be parsed; message carries the line number.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A file is syntactically fine but does not match the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A configuration value is out of range or unknown.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Training data cannot support the requested fit (e.g. all rows identical).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// An iterative method produced a non-finite value.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Filesystem trouble: unwritable path, missing file, refusal to overwrite.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace txlife
