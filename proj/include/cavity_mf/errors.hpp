#ifndef CAVITY_MF_ERRORS_HPP
#define CAVITY_MF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cavity_mf {

/// Parameter values outside the domain of a formula (e.g. a singular
/// adiabatic elimination).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration input. Carries the offending
/// key and line number when known (line 0 means "not from a file").
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string key = {}, int line = 0)
        : std::runtime_error(format(message, key, line)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& message, const std::string& key, int line) {
        std::string out = message;
        if (!key.empty()) out += " (key '" + key + "')";
        if (line > 0) out += " at line " + std::to_string(line);
        return out;
    }

    std::string key_;
    int line_;
};

/// A numerical procedure failed (non-convergence, step-size underflow, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace cavity_mf

#endif
