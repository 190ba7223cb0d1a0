#pragma once

#include <stdexcept>
#include <string>

namespace kiosk {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration; `field()` names the offending setting.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, std::string message)
        : std::invalid_argument(field + ": " + message),
          field_(std::move(field)),
          message_(std::move(message)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

/// A sampler could not produce a value (e.g. truncated normal redraw cap hit).
class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data does not match the expected schema or grid shape.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kiosk
