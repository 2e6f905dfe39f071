#pragma once

#include <stdexcept>
#include <string>

namespace ehpc {

/// Argument outside the mathematical domain of an operation (CLI exit code 2).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The threshold problem is degenerate: r'(x_lo) == r'(x_hi), so the greedy
/// policy is optimal at every capacity and c* is not defined.
class DegenerateThreshold : public DomainError {
public:
    DegenerateThreshold() : DomainError("greedy optimal for all c: r'(x_lo) == r'(x_hi)") {}
};

/// An iterative numerical method did not reach its tolerance (CLI exit code 3).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A policy asked to consume more energy than is stored.
class AdmissibilityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace ehpc
