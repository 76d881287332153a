#pragma once

#include <stdexcept>
#include <string>

namespace sentimix {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed corpus / resource file (line-oriented problems).
class FormatError : public Error {
public:
    using Error::Error;
};

// A field parsed fine structurally but holds an unacceptable value.
class ValueError : public Error {
public:
    using Error::Error;
};

// Byte stream is not valid UTF-8.
class DecodeError : public Error {
public:
    using Error::Error;
};

// A required resource for the requested configuration is missing,
// or flags conflict.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A computation would exceed its resource budget. Grid runners render
// this as the "KC" cell instead of aborting the whole grid.
class ResourceError : public Error {
public:
    using Error::Error;
};

} // namespace sentimix
