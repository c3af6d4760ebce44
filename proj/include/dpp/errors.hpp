#pragma once

#include <stdexcept>
#include <string>

namespace dpp {

// Violated precondition or invalid argument (maps to CLI exit code 1).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside a kernel's domain of definition.
struct DomainError : PreconditionError {
    explicit DomainError(const std::string& msg) : PreconditionError(msg) {}
};

// A quantity required to be positive/invertible degenerated (vanishing
// intensity, normalizer with > 20% relative error, ...).
struct DegenerateError : PreconditionError {
    explicit DegenerateError(const std::string& msg) : PreconditionError(msg) {}
};

// Numerical failure that indicates a broken discretization rather than bad
// user input (eigenvalue excursions, non-finite values).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dpp
