#pragma once

#include <stdexcept>
#include <string>

namespace otdf {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration or schema violation (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Numerical failure: integrator, root solve, calibration (CLI exit code 3).
struct NumericError : Error {
    using Error::Error;
};

struct TruncationError : NumericError {
    using NumericError::NumericError;
};

struct StiffnessError : NumericError {
    using NumericError::NumericError;
};

struct IntegratorError : NumericError {
    using NumericError::NumericError;
};

struct CalibrationError : NumericError {
    using NumericError::NumericError;
};

// Statistical estimation failure (CLI exit code 4).
struct StatsError : Error {
    using Error::Error;
};

struct FitError : StatsError {
    using StatsError::StatsError;
};

struct BootstrapError : StatsError {
    using StatsError::StatsError;
};

}  // namespace otdf
