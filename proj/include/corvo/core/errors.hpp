#pragma once

#include <stdexcept>
#include <string>

namespace corvo {

/// Invalid parameter or mismatched configuration (bad intrinsics, size mismatch, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or non-finite input data.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Missing or unreadable files, malformed dataset entries.
class LoadError : public std::runtime_error {
public:
    explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace corvo
