#pragma once

#include <stdexcept>
#include <string>

namespace slicesim {

/// Raised when a caller breaks a documented precondition (bad dimensions,
/// releasing a slice that does not exist, looking up a non-admissible state).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when a model or configuration value is outside its domain.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when enumeration of the feasibility space would exceed the cap.
class StateSpaceTooLarge : public std::runtime_error {
public:
    StateSpaceTooLarge(std::size_t cap)
        : std::runtime_error("state space too large: more than " + std::to_string(cap) +
                             " feasible states"),
          cap_(cap) {}

    [[nodiscard]] std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

/// Series, quadrature or iteration that failed to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace slicesim
