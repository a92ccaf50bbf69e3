#pragma once

#include <stdexcept>
#include <string>

namespace plqr {

// Exit-code classes used by the CLI front end.
enum class ErrorClass : int {
    generic = 1,
    validation = 2,
    solver = 3,
    io = 4,
};

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual ErrorClass error_class() const { return ErrorClass::generic; }
};

// Bad inputs: config schema violations, out-of-domain arguments, shape mismatches.
struct ValidationError : Error {
    using Error::Error;
    ErrorClass error_class() const override { return ErrorClass::validation; }
};

// Numerical failures inside the design/simulation machinery.
struct SolverError : Error {
    using Error::Error;
    ErrorClass error_class() const override { return ErrorClass::solver; }
};

struct SingularMatrixError : SolverError {
    using SolverError::SolverError;
};

struct OverflowError : SolverError {
    using SolverError::SolverError;
};

struct SchurConvergenceError : SolverError {
    using SolverError::SolverError;
};

// An eigenvalue sits too close to the selection boundary to partition the spectrum.
struct PredicateSplitError : SolverError {
    using SolverError::SolverError;
};

struct SubspaceExtractionError : SolverError {
    using SolverError::SolverError;
};

struct ResidualExceededError : SolverError {
    using SolverError::SolverError;
};

struct NoStabilizingSolutionError : SolverError {
    using SolverError::SolverError;
};

// The simulated state left the reduced-quaternion chart (rotation approaching 180 deg).
struct ChartExitError : SolverError {
    using SolverError::SolverError;
};

struct RunawayStateError : SolverError {
    using SolverError::SolverError;
};

struct IoError : Error {
    using Error::Error;
    ErrorClass error_class() const override { return ErrorClass::io; }
};

}  // namespace plqr
