#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "linrep/grid.hpp"
#include "linrep/models.hpp"
#include "linrep/probability.hpp"

namespace linrep {

/// Coordinates of the heaviest node; ties go to the lowest flattened index.
Eigen::VectorXd mode(const ProbabilityVector& p);

/// sum_i p_i x_i per axis.
Eigen::VectorXd mean(const ProbabilityVector& p);

/// sqrt(sum_i p_i (x_i - mean)^2) per axis.
Eigen::VectorXd std_dev(const ProbabilityVector& p);

/// Mass on nodes with |x_a - x_ref_a| < eps on every axis. Requires eps > 0.
double p_epsilon(const ProbabilityVector& p, const Eigen::VectorXd& x_ref, double eps);

struct TrajectoryError {
    double rmse = 0.0;
    /// First sample time with |error| > threshold; +inf if there is none.
    double horizon = 0.0;
};

/// Euclidean error per sample. Both trajectories must share their sample
/// times (to 1e-9 relative) and state dimension.
TrajectoryError trajectory_error(const Trajectory& predicted, const Trajectory& reference, double threshold);

/// Per-sample diagnostics of one run.
struct SummaryStatistics {
    std::size_t dim = 0;
    std::vector<double> epsilons;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> modes;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::VectorXd> stds;
    /// p_eps[k][e]: sample k, epsilon e.
    std::vector<std::vector<double>> p_eps;

    std::size_t size() const noexcept { return times.size(); }

    /// Appends one density sample; x_ref is the reference state for p_eps.
    void add(double t, const ProbabilityVector& p, const Eigen::VectorXd& x_ref);

    /// Appends a point prediction (observable methods): mode = mean = x,
    /// std 0, and p_eps is 1 when x lies within eps of x_ref, else 0.
    void add_point(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& x_ref);

    Trajectory mode_trajectory() const;
    Trajectory mean_trajectory() const;
};

/// Columns t, mode_<axis>..., mean_<axis>..., std_<axis>..., p_eps@<eps>...
/// with axes named x (and y).
void write_summary_csv(const SummaryStatistics& s, std::ostream& out);
void write_summary_csv(const SummaryStatistics& s, const std::filesystem::path& path);

/// Reads a file written by write_summary_csv.
SummaryStatistics read_summary_csv(const std::filesystem::path& path);

}  // namespace linrep
