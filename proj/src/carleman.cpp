#include "linrep/carleman.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "linrep/ode.hpp"

namespace linrep {

namespace {

// Exponent tuples of total degree `degree` in descending lexicographic order.
void append_degree(int dim, int degree, MultiIndex& prefix, std::vector<MultiIndex>& out) {
    if (static_cast<int>(prefix.size()) == dim - 1) {
        prefix.push_back(degree);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        prefix.push_back(e);
        append_degree(dim, degree - e, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

MonomialBasis::MonomialBasis(int dim, int max_total_degree) : dim_(dim), max_degree_(max_total_degree) {
    if (dim < 1 || dim > 2) throw std::invalid_argument("MonomialBasis: dim must be 1 or 2");
    if (max_total_degree < 0) throw std::invalid_argument("MonomialBasis: degree must be nonnegative");
    MultiIndex prefix;
    for (int d = 0; d <= max_total_degree; ++d) append_degree(dim, d, prefix, ordering_);
    for (std::size_t k = 0; k < ordering_.size(); ++k) {
        lookup_.emplace(ordering_[k], static_cast<Eigen::Index>(k));
    }
}

std::optional<Eigen::Index> MonomialBasis::index_of(const MultiIndex& exponents) const {
    auto it = lookup_.find(exponents);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

Eigen::VectorXd MonomialBasis::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) throw std::invalid_argument("MonomialBasis::evaluate: dimension mismatch");
    // Powers are built by repeated multiplication so every entry is the
    // same floating-point product regardless of where it is requested.
    std::vector<std::vector<double>> powers(static_cast<std::size_t>(dim_));
    for (int a = 0; a < dim_; ++a) {
        auto& p = powers[static_cast<std::size_t>(a)];
        p.resize(static_cast<std::size_t>(max_degree_) + 1);
        p[0] = 1.0;
        for (int e = 1; e <= max_degree_; ++e) p[static_cast<std::size_t>(e)] = p[static_cast<std::size_t>(e) - 1] * x[a];
    }
    Eigen::VectorXd g(size());
    for (Eigen::Index k = 0; k < size(); ++k) {
        double v = 1.0;
        const auto& ex = ordering_[static_cast<std::size_t>(k)];
        for (int a = 0; a < dim_; ++a) {
            v *= powers[static_cast<std::size_t>(a)][static_cast<std::size_t>(ex[static_cast<std::size_t>(a)])];
        }
        g[k] = v;
    }
    return g;
}

std::vector<Eigen::Index> MonomialBasis::linear_indices() const {
    if (max_degree_ < 1) throw std::logic_error("MonomialBasis: no degree-1 monomials in a degree-0 basis");
    std::vector<Eigen::Index> idx;
    for (int a = 0; a < dim_; ++a) {
        MultiIndex e(static_cast<std::size_t>(dim_), 0);
        e[static_cast<std::size_t>(a)] = 1;
        idx.push_back(*index_of(e));
    }
    return idx;
}

Eigen::VectorXd MonomialBasis::state_from_observables(const Eigen::VectorXd& g) const {
    if (g.size() != size()) throw std::invalid_argument("state_from_observables: size mismatch");
    const auto idx = linear_indices();
    Eigen::VectorXd x(dim_);
    for (int a = 0; a < dim_; ++a) x[a] = g[idx[static_cast<std::size_t>(a)]];
    return x;
}

MonomialBasis enumerate_monomials(int dim, int max_total_degree) { return MonomialBasis(dim, max_total_degree); }

CarlemanSystem lift_decay(int truncation_order) {
    if (truncation_order < 1) throw std::invalid_argument("lift_decay: order must be >= 1");
    MonomialBasis basis(1, truncation_order);
    const Eigen::Index n = basis.size();
    std::vector<Eigen::Triplet<double>> entries;
    for (int k = 1; k < truncation_order; ++k) entries.emplace_back(k, k + 1, -static_cast<double>(k));
    Eigen::SparseMatrix<double, Eigen::RowMajor> l(n, n);
    l.setFromTriplets(entries.begin(), entries.end());
    return {std::move(basis), std::move(l), "zero-derivative@" + std::to_string(truncation_order)};
}

CarlemanSystem lift_vdp(int max_total_degree, double mu) {
    if (max_total_degree < 3) throw std::invalid_argument("lift_vdp: degree must be >= 3");
    MonomialBasis basis(2, max_total_degree);
    const Eigen::Index size = basis.size();
    std::vector<Eigen::Triplet<double>> entries;
    auto couple = [&](Eigen::Index row, int m, int n, double coefficient) {
        if (coefficient == 0.0 || m < 0 || n < 0) return;
        // Couplings leaving the basis are dropped.
        if (auto col = basis.index_of({m, n})) entries.emplace_back(row, *col, coefficient);
    };
    for (Eigen::Index row = 0; row < size; ++row) {
        const int m = basis.exponents(row)[0];
        const int n = basis.exponents(row)[1];
        if (m + n >= max_total_degree - 1) continue;
        couple(row, m - 1, n + 1, m);
        couple(row, m + 1, n - 1, -n);
        couple(row, m, n, mu * n);
        couple(row, m + 2, n, -mu * n);
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> l(size, size);
    l.setFromTriplets(entries.begin(), entries.end());
    return {std::move(basis), std::move(l), "zero-derivative@" + std::to_string(max_total_degree - 1)};
}

Trajectory LinearPropagation::states(const MonomialBasis& basis) const {
    std::vector<Eigen::VectorXd> x;
    x.reserve(observables.size());
    for (const auto& g : observables.states()) x.push_back(basis.state_from_observables(g));
    return Trajectory(observables.times(), std::move(x));
}

LinearPropagation propagate_linear(const CarlemanSystem& system, const Eigen::VectorXd& x0,
                                   std::span<const double> times, double tol) {
    if (system.generator.rows() != system.basis.size() || system.generator.cols() != system.basis.size()) {
        throw std::invalid_argument("propagate_linear: generator does not match basis");
    }
    LinearPropagation result;
    if (times.empty()) return result;

    const Eigen::VectorXd g0 = system.basis.evaluate(x0);
    numerics::AdaptiveOptions opt;
    opt.abs_tol = tol;
    opt.rel_tol = tol;
    const auto& l = system.generator;
    auto rhs = [&l](double, const Eigen::VectorXd& g, Eigen::VectorXd& dg) { dg.noalias() = l * g; };
    auto sol = numerics::solve_ivp(rhs, times.front(), g0, times, opt);
    if (!sol.ok()) result.divergence_time = sol.failure_time;
    result.observables = Trajectory(std::move(sol.times), std::move(sol.states));
    return result;
}

double carleman_error_bound(int n, double t) {
    if (n < 0) throw std::invalid_argument("carleman_error_bound: n must be nonnegative");
    if (!(t >= 0.0) || !(t < 1.0)) throw std::invalid_argument("carleman_error_bound: requires 0 <= t < 1");
    return std::pow(t, n) / (1.0 - t);
}

double invariant_observable(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("invariant_observable: x must be positive");
    return std::exp(-1.0 / x);
}

double invariant_inverse(double g) {
    if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("invariant_inverse: g must lie in (0, 1)");
    return -1.0 / std::log(g);
}

double solve_via_invariant(double x0, double t) {
    if (!(x0 > 0.0)) throw std::invalid_argument("solve_via_invariant: x0 must be positive");
    return invariant_inverse(std::exp(-t) * invariant_observable(x0));
}

}  // namespace linrep
