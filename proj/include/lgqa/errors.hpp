#pragma once

#include <stdexcept>
#include <string>

namespace lgqa {

/// A caller broke an operation's precondition (non-Hermitian observable,
/// invalid parameter block, malformed density matrix).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A time argument fell outside the schedule's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The stepper produced a state outside the positivity tolerance.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

/// A weak-measurement outcome with vanishing likelihood under the current state.
class DegenerateOutcome : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lgqa
