#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace tokencast {

/// A single observation: a finite real value, or std::nullopt for a
/// missing measurement. Missing is a dedicated state, never a NaN,
/// so it can not leak into arithmetic.
using Obs = std::optional<double>;

/// Token id into the model vocabulary (PAD, EOS, then bin tokens).
using TokenId = std::int32_t;

/// Bad run configuration (invalid knob values, unknown keys).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or contract-violating input data.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (Cholesky breakdown, non-finite loss, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / stream failure, message carries the path.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tokencast
