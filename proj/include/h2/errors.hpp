#pragma once
#include <stdexcept>
#include <string>

namespace h2 {

// Bad or missing input data (files, configs, malformed rows). CLI maps these to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Arguments that violate an operation's preconditions.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model run ended infeasible or at an iteration limit. CLI maps these to
// exit code 1.
class ModelOutcomeError : public std::runtime_error {
public:
    explicit ModelOutcomeError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace h2
