#pragma once

#include <stdexcept>
#include <string>

namespace drrl {

/// Mismatched lengths or shapes between arguments.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside its mathematical domain (negative probability, bad radius, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A model or table failed its structural invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An exhaustive computation would exceed its configured enumeration budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double required, double budget)
        : std::runtime_error(what), required_(required), budget_(budget) {}
    double required() const noexcept { return required_; }
    double budget() const noexcept { return budget_; }

private:
    double required_;
    double budget_;
};

/// Non-finite value produced by a simulation or a training step.
class NumericFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace drrl
