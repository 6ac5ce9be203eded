#include "linrep/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace linrep::numerics {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;  // step never shrinks by more than this factor
constexpr double kFacMax = 10.0;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;

double rms_scaled(const Eigen::VectorXd& v, const Eigen::VectorXd& scale) {
    if (v.size() == 0) return 0.0;
    return std::sqrt((v.array() / scale.array()).square().sum() / static_cast<double>(v.size()));
}

bool diverged(const Eigen::VectorXd& y, double threshold) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]) || std::abs(y[i]) > threshold) return true;
    }
    return false;
}

double initial_step(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, const AdaptiveOptions& opt) {
    Eigen::VectorXd scale = (opt.abs_tol + opt.rel_tol * y0.array().abs()).matrix();
    const double d0 = rms_scaled(y0, scale);
    const double d1 = rms_scaled(f0, scale);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    Eigen::VectorXd y1 = y0 + h0 * f0;
    Eigen::VectorXd f1(y0.size());
    rhs(t0 + h0, y1, f1);
    const double d2 = rms_scaled(f1 - f0, scale) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min(100.0 * h0, h1);
}

}  // namespace

IvpSolution solve_ivp(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                      std::span<const double> output_times, const AdaptiveOptions& opt) {
    if (!(opt.abs_tol > 0.0) || !(opt.rel_tol > 0.0)) {
        throw std::invalid_argument("solve_ivp: tolerances must be positive");
    }
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < t0 || (i > 0 && output_times[i] < output_times[i - 1])) {
            throw std::invalid_argument("solve_ivp: output times must be nondecreasing and >= t0");
        }
    }

    IvpSolution sol;
    sol.times.reserve(output_times.size());
    sol.states.reserve(output_times.size());

    const Eigen::Index n = y0.size();
    double t = t0;
    Eigen::VectorXd y = y0;
    if (diverged(y, opt.overflow_threshold)) {
        sol.status = IvpStatus::Diverged;
        sol.failure_time = t;
        return sol;
    }

    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n),
        scale(n);
    rhs(t, y, k1);

    double h = -1.0;
    double facold = 1e-4;
    bool last_rejected = false;
    const double eps = std::numeric_limits<double>::epsilon();

    for (double t_out : output_times) {
        while (t < t_out) {
            if (h < 0.0) h = initial_step(rhs, t, y, k1, opt);
            if (sol.accepted_steps + sol.rejected_steps >= opt.max_steps) {
                sol.status = IvpStatus::MaxStepsExceeded;
                sol.failure_time = t;
                return sol;
            }
            if (h < 16.0 * eps * std::max(1.0, std::abs(t))) {
                sol.status = diverged(y, opt.overflow_threshold * 1e-8) ? IvpStatus::Diverged
                                                                        : IvpStatus::StepSizeUnderflow;
                sol.failure_time = t;
                return sol;
            }
            // Land exactly on the output time without shrinking the controller's h.
            const bool clipped = t + h >= t_out;
            const double step = clipped ? t_out - t : h;

            ytmp = y + step * a21 * k1;
            rhs(t + c2 * step, ytmp, k2);
            ytmp = y + step * (a31 * k1 + a32 * k2);
            rhs(t + c3 * step, ytmp, k3);
            ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * step, ytmp, k4);
            ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * step, ytmp, k5);
            ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + step, ytmp, k6);
            ynew = y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            rhs(t + step, ynew, k7);
            err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            scale = (opt.abs_tol + opt.rel_tol * y.array().abs().max(ynew.array().abs())).matrix();
            const double err_norm = rms_scaled(err, scale);

            if (!std::isfinite(err_norm)) {
                ++sol.rejected_steps;
                last_rejected = true;
                h = step * kFacMin;
                continue;
            }

            const double fac11 = std::pow(err_norm, kExpo);
            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
            double h_new = step / fac;

            if (err_norm <= 1.0) {
                ++sol.accepted_steps;
                facold = std::max(err_norm, 1e-4);
                if (last_rejected) h_new = std::min(h_new, step);
                last_rejected = false;
                t = clipped ? t_out : t + step;
                y = ynew;
                k1 = k7;
                if (diverged(y, opt.overflow_threshold)) {
                    sol.status = IvpStatus::Diverged;
                    sol.failure_time = t;
                    return sol;
                }
                // A clipped step whose growth factor saturated says nothing about h.
                if (!clipped) {
                    h = h_new;
                } else if (fac > 1.0 / kFacMax) {
                    h = std::min(h, h_new);
                }
            } else {
                ++sol.rejected_steps;
                last_rejected = true;
                h = step / std::min(1.0 / kFacMin, fac11 / kSafety);
            }
        }
        sol.times.push_back(t_out);
        sol.states.push_back(y);
    }
    return sol;
}

}  // namespace linrep::numerics
