#pragma once

#include <stdexcept>
#include <string>

namespace ammlab {

// Argument outside the mathematical domain of an operation (non-positive
// price, liquidity, etc.).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical procedure (quadrature, tabulation) failed to reach its target
// accuracy.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// An arbitrage run produced no events where at least one was required.
class NoArbitrageError : public std::runtime_error {
public:
    NoArbitrageError() : std::runtime_error("no arbitrage occurred") {}
};

// A campaign would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration. `line` is 0 when the problem is not tied
// to a specific line of a config document.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, int line, const std::string& message)
        : std::runtime_error(format(field, line, message)),
          field_(std::move(field)), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, int line,
                              const std::string& message) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!field.empty()) out += "field '" + field + "': ";
        return out + message;
    }

    std::string field_;
    int line_;
};

}  // namespace ammlab
