#pragma once

#include <stdexcept>
#include <string>

namespace islm {

/// Invalid parameterization. `field()` names the offending entry.
class ModelError : public std::invalid_argument {
public:
    ModelError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)), reason_(what) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    /// The message without the field prefix.
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

protected:
    struct Formatted {};
    ModelError(Formatted, std::string field, const std::string& reason, const std::string& full)
        : std::invalid_argument(full), field_(std::move(field)), reason_(reason) {}

private:
    std::string field_;
    std::string reason_;
};

/// Evaluation outside the economic domain (negative income).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure: step-size underflow, broken continuation, stalled fold.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace islm
