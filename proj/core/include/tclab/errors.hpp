#pragma once

#include <stdexcept>
#include <string>

namespace tclab {

// Error taxonomy shared by all modules. Callers catch the specific type;
// the CLI maps any of them to a nonzero exit with the message.

class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

class OutOfRange : public std::out_of_range {
public:
    explicit OutOfRange(const std::string& msg) : std::out_of_range(msg) {}
};

// A numerical routine produced a non-finite or negative quantity where one
// is not allowed; carries the location in its message.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// The inverse clock ran out of base path before reaching the last grid
// point; the caller should extend the base path horizon and retry.
class HorizonExhausted : public std::runtime_error {
public:
    explicit HorizonExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

// Forward integration requested through a zero of the coefficient.
class DegenerateRegime : public std::runtime_error {
public:
    explicit DegenerateRegime(const std::string& msg) : std::runtime_error(msg) {}
};

// Horizon retries exhausted while simulating an ensemble.
class InfeasibleScenario : public std::runtime_error {
public:
    explicit InfeasibleScenario(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tclab
