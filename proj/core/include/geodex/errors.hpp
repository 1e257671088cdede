#pragma once

#include <stdexcept>
#include <string>

namespace geodex {

// Bad inputs, malformed configs, violated preconditions. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures of the numerics themselves (blow-ups, singular systems,
// exhausted budgets). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonPositiveDefiniteError : public NumericError {
public:
    explicit NonPositiveDefiniteError(const std::string& msg) : NumericError(msg) {}
};

class StiffnessError : public NumericError {
public:
    explicit StiffnessError(const std::string& msg) : NumericError(msg) {}
};

// Perturbation amplitude too large for the construction to stay invertible.
class AmplitudeError : public ValidationError {
public:
    explicit AmplitudeError(const std::string& msg) : ValidationError(msg) {}
};

// Continuation step failed after all halvings; carries where it broke.
class ContinuationError : public NumericError {
public:
    ContinuationError(const std::string& msg, int solution_index, double blend)
        : NumericError(msg), solution_index(solution_index), blend_parameter(blend) {}
    int solution_index;
    double blend_parameter;
};

} // namespace geodex
