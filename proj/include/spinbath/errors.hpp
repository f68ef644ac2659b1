#pragma once

#include <stdexcept>
#include <string>

namespace spinbath {

// Invalid model or experiment parameters. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Caller passed mismatched shapes or inconsistent arguments. CLI exit code 1.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical invariant (norm, trace, hermiticity, positivity) was violated.
// CLI exit code 2.
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spinbath
