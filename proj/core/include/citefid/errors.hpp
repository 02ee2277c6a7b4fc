#pragma once

#include <stdexcept>
#include <string>

namespace citefid {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration or CLI usage (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A stage was run before the stage that produces its inputs (exit code 3).
class DependencyError : public Error {
public:
    DependencyError(std::string stage, std::string missing_stage, const std::string& detail)
        : Error(detail), stage_(std::move(stage)), missing_stage_(std::move(missing_stage)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& missing_stage() const noexcept { return missing_stage_; }

private:
    std::string stage_;
    std::string missing_stage_;
};

// Remote model service unreachable, timed out, or answered off-protocol (exit code 4).
class TransportError : public Error {
public:
    using Error::Error;
};

// Design matrix is rank deficient.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Too few observations for the requested estimate.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// A caller violated an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Another process holds the output directory lock.
class LockError : public Error {
public:
    using Error::Error;
};

}  // namespace citefid
