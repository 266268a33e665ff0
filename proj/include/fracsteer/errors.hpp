#pragma once

#include <stdexcept>
#include <string>

namespace fracsteer {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// A series or iteration failed to converge within its budget.
struct EvaluationError : Error {
    using Error::Error;
};

// Input is inside the domain but outside the useful range of the chosen
// representation (e.g. an asymptotic series evaluated too close to zero).
struct RangeError : Error {
    using Error::Error;
};

// A configuration or hypothesis check failed.
struct ValidationError : Error {
    using Error::Error;
};

// Two objects that must share a discretization do not.
struct ContractError : ValidationError {
    using ValidationError::ValidationError;
};

// NaN/Inf appeared, or a factorization broke down.
struct NumericError : Error {
    using Error::Error;
};

// Not enough grid resolution for the requested operation.
struct ResolutionError : Error {
    using Error::Error;
};

// Filesystem / serialization failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace fracsteer
