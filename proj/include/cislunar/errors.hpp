#pragma once

#include <stdexcept>
#include <string>

namespace cislunar {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A worldline that passes through the interior of a modeled body.
class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

// Caller handed in data that violates an operation's precondition.
class InputError : public Error {
public:
    using Error::Error;
};

// Invalid configuration. `key()` names the offending key when one is known,
// `line()` is the 1-based source line or 0.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message, std::string key = {}, int line = 0)
        : Error(message), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

class FitFailure : public Error {
public:
    using Error::Error;
};

}  // namespace cislunar
