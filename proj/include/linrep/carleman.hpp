#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "linrep/models.hpp"

namespace linrep {

using MultiIndex = std::vector<int>;

/// All monomials x^a (|a| <= max_total_degree) in graded order: total degree
/// ascending, then exponent tuples in descending lexicographic order, e.g.
/// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) in two dimensions.
class MonomialBasis {
public:
    MonomialBasis(int dim, int max_total_degree);

    int dim() const noexcept { return dim_; }
    int max_total_degree() const noexcept { return max_degree_; }
    Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(ordering_.size()); }
    const std::vector<MultiIndex>& ordering() const noexcept { return ordering_; }
    const MultiIndex& exponents(Eigen::Index k) const { return ordering_.at(static_cast<std::size_t>(k)); }

    /// Position of a multi-index, or std::nullopt when outside the basis.
    std::optional<Eigen::Index> index_of(const MultiIndex& exponents) const;

    /// Monomials evaluated at x, in basis order.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

    /// Positions of the degree-1 monomials x_1 .. x_N.
    std::vector<Eigen::Index> linear_indices() const;

    /// Reads the state back out of an observable vector.
    Eigen::VectorXd state_from_observables(const Eigen::VectorXd& g) const;

    bool operator==(const MonomialBasis& other) const {
        return dim_ == other.dim_ && max_degree_ == other.max_degree_;
    }

private:
    int dim_;
    int max_degree_;
    std::vector<MultiIndex> ordering_;
    std::map<MultiIndex, Eigen::Index> lookup_;
};

MonomialBasis enumerate_monomials(int dim, int max_total_degree);

/// Truncated linear system dg/dt = L g over a monomial basis.
struct CarlemanSystem {
    MonomialBasis basis;
    Eigen::SparseMatrix<double, Eigen::RowMajor> generator;
    std::string closure;
};

/// dg_k/dt = -k g_{k+1} for 1 <= k < order, dg_order/dt = 0.
CarlemanSystem lift_decay(int truncation_order);

/// Van der Pol lifting over x^m y^n with m + n <= max_total_degree; rows
/// with m + n >= max_total_degree - 1 are zeroed to close the hierarchy.
CarlemanSystem lift_vdp(int max_total_degree, double mu);

/// Observable trajectory plus the time of the first overflow, if any. On
/// divergence the trajectory holds the samples reached before it.
struct LinearPropagation {
    Trajectory observables;
    std::optional<double> divergence_time;

    bool diverged() const noexcept { return divergence_time.has_value(); }
    Trajectory states(const MonomialBasis& basis) const;
};

/// Integrates dg/dt = L g from g(0) = monomials(x0) with the adaptive
/// integrator (abs/rel tolerance 1e-10).
LinearPropagation propagate_linear(const CarlemanSystem& system, const Eigen::VectorXd& x0,
                                   std::span<const double> times, double tol = 1e-10);

/// Truncation error bound t^n / (1 - t) for the decay model; 0 <= t < 1.
double carleman_error_bound(int n, double t);

/// exp(-1/x): evolves as dg/dt = -g under dx/dt = -x^2.
double invariant_observable(double x);
/// -1/log(g) for g in (0, 1).
double invariant_inverse(double g);
double solve_via_invariant(double x0, double t);

}  // namespace linrep
