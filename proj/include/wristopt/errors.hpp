#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wristopt {

// Thrown by frequency-domain evaluation when |denominator(jw)| falls below
// tolerance; callers sweeping a grid skip or refine around the offending w.
class PoleAtFrequency : public std::runtime_error {
public:
    explicit PoleAtFrequency(double omega)
        : std::runtime_error("transfer function has a pole near w = " + std::to_string(omega)),
          omega_(omega) {}
    double omega() const { return omega_; }

private:
    double omega_;
};

class GridTooCoarse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Simulation state left the sane region (|q| or |qdot| > 1e6); the trial
// layer converts this into penalty fitness rather than letting it escape.
class NumericalBlowup : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyTrace : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingTraces : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidReference : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RepairFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Carries every failed invariant found while validating a config, not just
// the first one.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string message, std::vector<std::string> violations)
        : std::runtime_error(std::move(message)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

} // namespace wristopt
