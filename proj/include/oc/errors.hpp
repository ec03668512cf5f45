#pragma once

#include <stdexcept>
#include <string>

namespace oc {

// Thrown when a configuration or call-site precondition is violated.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iteration fails to converge or a numerical guarantee
// (unitarity, residual bound) cannot be met.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an operation has too few data points to proceed.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace oc
