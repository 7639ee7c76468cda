#pragma once

#include <stdexcept>
#include <string>

namespace spellforge {

// Base of every error the engine throws. `code()` is a stable machine-readable
// identifier used by the HTTP API and the CLI's JSON diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Caller handed us something unusable (empty prompt, bad fraction, ...).
class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error("invalid_input", message) {}
};

// Data failed domain validation (labels, specs, decoded predictions).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message, std::string code = "validation_failed")
        : Error(std::move(code), message) {}
};

// File or stream content that cannot be decoded.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("bad_format", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io_error", message) {}
};

// Prediction backend misbehaved: process died, timed out, or spoke garbage.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& message, std::string code = "backend_failure")
        : Error(std::move(code), message) {}
};

// Backend reply was well-formed JSON but did not match the wire schema.
class ProtocolError : public BackendError {
public:
    explicit ProtocolError(const std::string& message) : BackendError(message, "protocol_error") {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& message) : Error("training_failed", message) {}
};

} // namespace spellforge
