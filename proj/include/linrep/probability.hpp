#pragma once

#include <Eigen/Dense>

#include "linrep/grid.hpp"

namespace linrep {

/// Nonnegative weights over the nodes of a grid summing to one (up to the
/// round-off of whatever produced them; see check()).
class ProbabilityVector {
public:
    ProbabilityVector() = default;
    ProbabilityVector(Grid grid, Eigen::VectorXd values);

    /// Unit mass on the node nearest to x.
    static ProbabilityVector delta(const Grid& grid, const Eigen::VectorXd& x);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    double operator[](Eigen::Index i) const { return values_[i]; }

    double sum() const { return values_.sum(); }
    double min() const { return values_.size() ? values_.minCoeff() : 0.0; }

    /// Negative round-off clipped to zero, for reporting.
    Eigen::VectorXd clipped() const { return values_.cwiseMax(0.0); }

    /// True when sum is within `sum_tol` of 1 and no entry is below -neg_tol.
    bool check(double sum_tol = 1e-10, double neg_tol = 1e-14) const;

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

}  // namespace linrep
