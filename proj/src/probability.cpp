#include "linrep/probability.hpp"

#include <cmath>
#include <stdexcept>

namespace linrep {

ProbabilityVector::ProbabilityVector(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw std::invalid_argument("ProbabilityVector: size does not match grid");
}

ProbabilityVector ProbabilityVector::delta(const Grid& grid, const Eigen::VectorXd& x) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(grid.size());
    p[grid.nearest_node(x)] = 1.0;
    return ProbabilityVector(grid, std::move(p));
}

bool ProbabilityVector::check(double sum_tol, double neg_tol) const {
    return std::abs(sum() - 1.0) <= sum_tol && min() >= -neg_tol;
}

}  // namespace linrep
