#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lcaudit {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input row. `line` is 1-based and counts the header.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

// Missing column, bad enumeration value, unsupported format version.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Curves and temperatures that do not cover a common window.
class AlignmentError : public Error {
public:
    using Error::Error;
};

// Operation called outside its domain (constant series, too few samples...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Linear algebra failure: singular system, non-convergent decomposition.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Invalid audit configuration (missing manifest for a requested suite...).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace lcaudit
