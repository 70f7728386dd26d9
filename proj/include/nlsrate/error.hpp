#pragma once

#include <stdexcept>
#include <string>

namespace nlsrate {

/// Base for everything the library throws on bad input or failed preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ResolutionError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// Thrown by the time stepper when the solution leaves the guard band.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double time, double max_amplitude)
        : Error(what), time_(time), max_amplitude_(max_amplitude) {}
    double time() const { return time_; }
    double max_amplitude() const { return max_amplitude_; }

private:
    double time_;
    double max_amplitude_;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

class HypothesisViolation : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// A scientific check could not be evaluated meaningfully (e.g. every sample
/// sits at round-off). Maps to exit code 1 in the CLI, not 2.
class DegenerateSamples : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nlsrate
