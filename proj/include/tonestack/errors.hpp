#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace tonestack {

/// Raised when an argument violates a documented precondition
/// (non-positive frequency, control outside [0, 1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for failures of the numerical pipeline itself.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, std::optional<double> frequency = std::nullopt)
        : std::runtime_error(what), frequency_(frequency) {}

    /// Frequency (Hz) of the grid point being solved, when known.
    [[nodiscard]] std::optional<double> frequency() const noexcept { return frequency_; }

private:
    std::optional<double> frequency_;
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace tonestack
