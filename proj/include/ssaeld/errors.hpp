#pragma once

#include <stdexcept>
#include <string>

namespace ssaeld {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Schedule or matrix length does not match the system's unit count.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Missing or invalid configuration (parameters, loss matrix, names).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A system or unit violates a model invariant. `rule()` names the rule.
class ModelError : public Error {
public:
    ModelError(std::string rule, const std::string& what)
        : Error(rule + ": " + what), rule_(std::move(rule)) {}

    const std::string& rule() const noexcept { return rule_; }

private:
    std::string rule_;
};

/// System file could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// The repair loop gave up; carries the balance residual it was left with.
class RepairError : public Error {
public:
    RepairError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace ssaeld
