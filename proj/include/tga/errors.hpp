#pragma once

#include <stdexcept>
#include <string>

namespace tga {

// Exit-code families used by the CLI:
//   2 config/flag, 3 data, 4 numeric divergence, 5 capability mismatch.
// Library code throws these; the CLI maps them to exit codes.

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class DivergedError : public std::runtime_error {
public:
    explicit DivergedError(const std::string& msg) : std::runtime_error(msg) {}
};

class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Programmer-facing shape/domain violations inside the numerics core.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Checkpoint loading failures, one type per negative control.
class BadMagicError : public DataError {
public:
    explicit BadMagicError(const std::string& msg) : DataError(msg) {}
};

class VersionMismatchError : public DataError {
public:
    explicit VersionMismatchError(const std::string& msg) : DataError(msg) {}
};

class TruncatedPayloadError : public DataError {
public:
    explicit TruncatedPayloadError(const std::string& msg) : DataError(msg) {}
};

} // namespace tga
