#pragma once

#include <stdexcept>
#include <string>

namespace linrep {

/// Base class for failures of a numerical method (as opposed to bad input,
/// which is reported with std::invalid_argument).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive integrator could not make progress; usually a sign of stiffness.
class StepSizeUnderflow : public NumericalError {
public:
    StepSizeUnderflow(double time, double step)
        : NumericalError("step size underflow at t=" + std::to_string(time) +
                         " (h=" + std::to_string(step) + "), problem is likely stiff"),
          time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// State left the representable floating range.
class DivergenceError : public NumericalError {
public:
    explicit DivergenceError(double time)
        : NumericalError("solution diverged (overflow) at t=" + std::to_string(time)),
          time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class CflViolation : public NumericalError {
public:
    CflViolation(double courant)
        : NumericalError("CFL condition violated: delta * max exit rate = " +
                         std::to_string(courant) + " > 1"),
          courant_(courant) {}
    double courant() const noexcept { return courant_; }

private:
    double courant_;
};

class KrylovNonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace linrep
