#pragma once

#include <stdexcept>
#include <string>

namespace fpdn {

// Violated precondition or broken internal contract (shape mismatch, non-scalar
// backward, non-finite input where finiteness is required).
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible spatial/channel dimensions between otherwise valid values.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or unresolvable configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// File read/write failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint or artifact that cannot be used with the requested configuration.
struct IncompatibleError : std::runtime_error {
    explicit IncompatibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training diverged (non-finite loss).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fpdn
