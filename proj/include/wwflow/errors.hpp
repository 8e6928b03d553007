#pragma once

#include <stdexcept>
#include <string>

namespace wwflow {

/// Invalid argument or configuration outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Derivative requested where the distribution is not differentiable.
class SingularPointError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Configuration that is well formed but not supported by an evaluator.
class UnsupportedConfigurationError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Quadrature grid does not capture enough of the distribution mass.
class CoverageError : public std::runtime_error {
public:
    CoverageError(const std::string& what, double tail_mass)
        : std::runtime_error(what), tail_mass_(tail_mass) {}
    double tail_mass() const noexcept { return tail_mass_; }

private:
    double tail_mass_;
};

/// Truncated series whose last term is still above tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A quantity that must be real came out with a significant imaginary part.
class NumericalConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trajectory did not return to its Poincare section.
class OpenOrbitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrator drift above tolerance; retry with a smaller step.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double drift)
        : std::runtime_error(what), drift_(drift) {}
    double drift() const noexcept { return drift_; }

private:
    double drift_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wwflow
