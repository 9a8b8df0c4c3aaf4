#ifndef CAVSIM_ERRORS_HPP
#define CAVSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cavsim {

// Invalid physical input (non-finite, out of range, contradictory).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration file problems: unknown keys, missing fields, bad types.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fit failed to converge; carries the iteration trace in the message.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cavsim

#endif
