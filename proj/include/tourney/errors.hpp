#pragma once

#include <stdexcept>
#include <string>

namespace tourney {

// Input outside a function's admissible range (e.g. n < 3 where log log n is needed).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A convolution result would exceed the configured atom budget.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (bad grids, replicate counts, model files).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exhaustive enumeration would need more weighted terms than allowed.
struct BudgetExceeded : std::runtime_error {
    unsigned long long required_terms;
    BudgetExceeded(const std::string& msg, unsigned long long required)
        : std::runtime_error(msg), required_terms(required) {}
};

}  // namespace tourney
