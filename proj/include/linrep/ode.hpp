#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace linrep::numerics {

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)>;

struct AdaptiveOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    long max_steps = 5'000'000;
    /// States with any |y_i| above this are treated as diverged.
    double overflow_threshold = 1e300;
};

enum class IvpStatus { Success, Diverged, StepSizeUnderflow, MaxStepsExceeded };

/// Samples at the requested times up to the point of failure; on failure
/// `failure_time` is the integrator time where it gave up.
struct IvpSolution {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    IvpStatus status = IvpStatus::Success;
    double failure_time = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;

    bool ok() const noexcept { return status == IvpStatus::Success; }
};

/// Dormand-Prince 5(4) with PI step-size control. Output times must be
/// nondecreasing and start at or after the initial time `t0`; the solution
/// is sampled exactly at them (steps are clipped to land on each).
IvpSolution solve_ivp(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                      std::span<const double> output_times, const AdaptiveOptions& options = {});

}  // namespace linrep::numerics
