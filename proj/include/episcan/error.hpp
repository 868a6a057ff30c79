#pragma once

#include <stdexcept>
#include <string>

namespace episcan {

/// Base of every error raised by the library. The CLI maps each kind to an
/// exit code and a machine-readable `kind` string.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept = 0;
    virtual int exit_code() const noexcept = 0;
};

/// A parameter lies outside the domain of the operation (p <= 0, alpha >= 1,
/// empty input, window out of range, ...).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
    int exit_code() const noexcept override { return 2; }
};

/// Cross-field configuration problem, e.g. alpha incompatible with tail mode.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config_error"; }
    int exit_code() const noexcept override { return 2; }
};

/// No critical-value table matches the requested (alpha, grid, reps, seed).
class CalibrationRequired : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "calibration_required"; }
    int exit_code() const noexcept override { return 3; }
};

/// Input data could not be parsed or is unusable.
class DataError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "data_error"; }
    int exit_code() const noexcept override { return 4; }
};

/// The least-squares denominator vanished (y is identically zero before n).
class DegenerateSeries : public DataError {
public:
    using DataError::DataError;
    const char* kind() const noexcept override { return "degenerate_series"; }
};

}  // namespace episcan
