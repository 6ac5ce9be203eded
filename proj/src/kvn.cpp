#include "linrep/kvn.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "linrep/errors.hpp"

namespace linrep {

// ---------------------------------------------------------------------------
// Wavefunction
// ---------------------------------------------------------------------------

Wavefunction::Wavefunction(Grid grid, ComplexVector amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != grid_.size()) throw std::invalid_argument("Wavefunction: size does not match grid");
    if (std::abs(amplitudes_.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("Wavefunction: amplitudes are not normalized");
    }
}

Wavefunction Wavefunction::normalized(Grid grid, ComplexVector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("Wavefunction: cannot normalize");
    amplitudes /= n;
    return Wavefunction(std::move(grid), std::move(amplitudes));
}

// ---------------------------------------------------------------------------
// HermitianOperator
// ---------------------------------------------------------------------------

HermitianOperator HermitianOperator::dense(Grid grid, ComplexMatrix matrix) {
    if (matrix.rows() != grid.size() || matrix.cols() != grid.size()) {
        throw std::invalid_argument("HermitianOperator: matrix does not match grid");
    }
    HermitianOperator h;
    h.grid_ = std::move(grid);
    h.norm_bound_ = matrix.cwiseAbs().colwise().sum().maxCoeff();
    h.matrix_ = std::move(matrix);
    return h;
}

HermitianOperator HermitianOperator::matrix_free(Grid grid, Action action, double norm_bound) {
    if (!action) throw std::invalid_argument("HermitianOperator: action is required");
    HermitianOperator h;
    h.grid_ = std::move(grid);
    h.action_ = std::move(action);
    h.norm_bound_ = norm_bound;
    return h;
}

const ComplexMatrix& HermitianOperator::matrix() const {
    if (!matrix_) throw std::logic_error("HermitianOperator: operator is matrix-free");
    return *matrix_;
}

void HermitianOperator::apply(const ComplexVector& v, ComplexVector& out) const {
    if (v.size() != dim()) throw std::invalid_argument("HermitianOperator: dimension mismatch");
    if (matrix_) {
        out.noalias() = *matrix_ * v;
    } else {
        action_(v, out);
    }
}

ComplexVector HermitianOperator::apply(const ComplexVector& v) const {
    ComplexVector out(dim());
    apply(v, out);
    return out;
}

ComplexMatrix HermitianOperator::to_dense() const {
    if (matrix_) return *matrix_;
    const Eigen::Index n = dim();
    ComplexMatrix m(n, n);
    ComplexVector e = ComplexVector::Zero(n);
    ComplexVector col(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        action_(e, col);
        m.col(j) = col;
        e[j] = 0.0;
    }
    return m;
}

HermitianOperator HermitianOperator::densified() const {
    if (matrix_) return *this;
    return dense(grid_, to_dense());
}

numerics::ComplexOperator HermitianOperator::scaled(Complex scale) const {
    numerics::ComplexOperator op;
    op.dim = dim();
    op.norm_bound = std::abs(scale) * norm_bound_;
    op.apply = [this, scale](const ComplexVector& in, ComplexVector& out) {
        apply(in, out);
        out *= scale;
    };
    return op;
}

double hermiticity_residual(const HermitianOperator& h, int probes) {
    if (h.is_dense()) {
        const auto& m = h.matrix();
        return (m - m.adjoint()).cwiseAbs().maxCoeff();
    }
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    auto random_unit = [&] {
        ComplexVector v(h.dim());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(normal(rng), normal(rng));
        return ComplexVector(v / v.norm());
    };
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const ComplexVector u = random_unit();
        const ComplexVector v = random_unit();
        const Complex lhs = u.dot(h.apply(v));
        const Complex rhs = h.apply(u).dot(v);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Spectral derivative and KvN Hamiltonian
// ---------------------------------------------------------------------------

Eigen::VectorXd wavenumbers(const Axis& axis) {
    const Eigen::Index n = axis.points;
    Eigen::VectorXd k(n);
    const double base = 2.0 * std::numbers::pi / axis.length();
    for (Eigen::Index m = 0; m < n; ++m) {
        const Eigen::Index signed_m = m < (n + 1) / 2 ? m : m - n;
        k[m] = base * static_cast<double>(signed_m);
    }
    if (n % 2 == 0) k[n / 2] = 0.0;
    return k;
}

namespace {

// -i d/dx_axis as a reusable kernel: FFT along the axis, multiply by the
// wavenumber of each entry, inverse FFT.
struct DerivativeKernel {
    numerics::AxisFft fft;
    Eigen::VectorXd symbol;  // wavenumber per flattened entry
    double max_wavenumber = 0.0;

    DerivativeKernel(const Grid& grid, std::size_t axis) : fft(grid.shape(), axis) {
        const Eigen::VectorXd k = wavenumbers(grid.axis(axis));
        symbol.resize(grid.size());
        std::vector<Eigen::Index> multi;
        for (Eigen::Index f = 0; f < grid.size(); ++f) {
            multi = grid.unflatten(f);
            symbol[f] = k[multi[axis]];
        }
        max_wavenumber = k.cwiseAbs().maxCoeff();
    }

    void apply(const ComplexVector& in, ComplexVector& out) const {
        out = in;
        fft.execute(out, numerics::FftDirection::Forward);
        out.array() *= symbol.array();
        fft.execute(out, numerics::FftDirection::Inverse);
    }
};

}  // namespace

HermitianOperator spectral_derivative(const Grid& grid, std::size_t axis) {
    if (axis >= grid.dim()) throw std::invalid_argument("spectral_derivative: axis out of range");
    auto kernel = std::make_shared<const DerivativeKernel>(grid, axis);
    const double bound = kernel->max_wavenumber;
    return HermitianOperator::matrix_free(
        grid, [kernel](const ComplexVector& in, ComplexVector& out) { kernel->apply(in, out); }, bound);
}

HermitianOperator assemble_kvn_hamiltonian(const Grid& grid, const FlowField& flow) {
    if (static_cast<int>(grid.dim()) != flow.dim()) {
        throw std::invalid_argument("assemble_kvn_hamiltonian: grid and flow dimensions differ");
    }
    struct Terms {
        std::vector<DerivativeKernel> derivatives;
        std::vector<Eigen::VectorXd> velocity;  // F_j at every node
    };
    auto terms = std::make_shared<Terms>();
    const Eigen::Index n = grid.size();
    const std::size_t dim = grid.dim();
    for (std::size_t j = 0; j < dim; ++j) {
        terms->derivatives.emplace_back(grid, j);
        terms->velocity.emplace_back(n);
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    Eigen::VectorXd f(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < n; ++i) {
        x = grid.point(i);
        flow.evaluate(std::span<const double>(x.data(), dim), std::span<double>(f.data(), dim));
        for (std::size_t j = 0; j < dim; ++j) terms->velocity[j][i] = f[static_cast<Eigen::Index>(j)];
    }
    double bound = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        bound += terms->velocity[j].cwiseAbs().maxCoeff() * terms->derivatives[j].max_wavenumber;
    }

    std::shared_ptr<const Terms> shared = terms;
    auto action = [shared](const ComplexVector& in, ComplexVector& out) {
        out.setZero(in.size());
        ComplexVector scratch(in.size());
        ComplexVector work(in.size());
        for (std::size_t j = 0; j < shared->derivatives.size(); ++j) {
            const auto& fj = shared->velocity[j];
            const auto& pj = shared->derivatives[j];
            work = in.cwiseProduct(fj.cast<Complex>());
            pj.apply(work, scratch);  // P (F psi)
            out += scratch;
            pj.apply(in, scratch);    // F (P psi)
            out += scratch.cwiseProduct(fj.cast<Complex>());
        }
        out *= 0.5;
    };
    return HermitianOperator::matrix_free(grid, std::move(action), bound);
}

// ---------------------------------------------------------------------------
// Initial states
// ---------------------------------------------------------------------------

Wavefunction delta_initial(const Grid& grid, const Eigen::VectorXd& point) {
    if (point.size() != static_cast<Eigen::Index>(grid.dim())) {
        throw std::invalid_argument("delta_initial: point dimension mismatch");
    }
    if (!grid.contains(point)) throw std::invalid_argument("delta_initial: point outside the domain");
    ComplexVector psi = ComplexVector::Zero(grid.size());
    psi[grid.nearest_node(point)] = 1.0;
    return Wavefunction(grid, std::move(psi));
}

Wavefunction gaussian_initial(const Grid& grid, const Eigen::VectorXd& center, int support_points) {
    if (center.size() != static_cast<Eigen::Index>(grid.dim())) {
        throw std::invalid_argument("gaussian_initial: center dimension mismatch");
    }
    if (!grid.contains(center)) throw std::invalid_argument("gaussian_initial: center outside the domain");
    if (support_points < 1) throw std::invalid_argument("gaussian_initial: support_points must be >= 1");
    if (support_points == 1) return delta_initial(grid, center);

    const auto c = grid.unflatten(grid.nearest_node(center));
    const Eigen::Index half = support_points / 2;
    const double mid_offset = support_points % 2 == 1 ? 0.0 : -0.5;
    const double sigma = (static_cast<double>(support_points) - 1.0) / 2.0 / 3.0;

    std::vector<std::vector<double>> profile(grid.dim());
    std::vector<Eigen::Index> first(grid.dim());
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        first[a] = c[a] - half;
        const Eigen::Index last = first[a] + support_points - 1;
        if (first[a] < 0 || last >= grid.axis(a).points) {
            throw std::invalid_argument("gaussian_initial: support of " + std::to_string(support_points) +
                                        " points does not fit inside the grid");
        }
        for (int s = 0; s < support_points; ++s) {
            const double r = static_cast<double>(s - half) - mid_offset;
            profile[a].push_back(std::exp(-r * r / (2.0 * sigma * sigma)));
        }
    }

    ComplexVector psi = ComplexVector::Zero(grid.size());
    std::vector<Eigen::Index> multi(grid.dim());
    if (grid.dim() == 1) {
        for (int s = 0; s < support_points; ++s) {
            multi[0] = first[0] + s;
            psi[grid.flatten(multi)] = profile[0][static_cast<std::size_t>(s)];
        }
    } else {
        for (int s = 0; s < support_points; ++s) {
            for (int r = 0; r < support_points; ++r) {
                multi[0] = first[0] + s;
                multi[1] = first[1] + r;
                psi[grid.flatten(multi)] = profile[0][static_cast<std::size_t>(s)] * profile[1][static_cast<std::size_t>(r)];
            }
        }
    }
    return Wavefunction::normalized(grid, std::move(psi));
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

KvnPropagator::KvnPropagator(const HermitianOperator& h, double delta, PropagatorOptions options)
    : h_(h), delta_(delta), options_(options) {
    if (!(delta > 0.0)) throw std::invalid_argument("KvnPropagator: delta must be positive");
    if (h_.dim() <= options_.dense_threshold) {
        const ComplexMatrix dense = h_.is_dense() ? h_.matrix() : h_.to_dense();
        propagator_ = numerics::expm(ComplexMatrix(Complex(0.0, -delta) * dense));
    }
}

Wavefunction KvnPropagator::step(const Wavefunction& psi) {
    if (!(psi.grid() == h_.grid())) throw std::invalid_argument("KvnPropagator: grid mismatch");
    ComplexVector next;
    if (propagator_) {
        next.noalias() = *propagator_ * psi.amplitudes();
    } else {
        numerics::ExpmvOptions opt;
        opt.tol = options_.krylov_tol;
        opt.krylov_dim = options_.krylov_dim;
        next = numerics::expmv(h_.scaled(Complex(0.0, -1.0)), psi.amplitudes(), delta_, opt);
    }
    const double norm = next.norm();
    const double drift = std::abs(norm - 1.0);
    max_drift_ = std::max(max_drift_, drift);
    if (options_.renormalize && drift > options_.renormalize_threshold) {
        next /= norm;
        ++renormalizations_;
    }
    return Wavefunction(psi.grid(), std::move(next));
}

Wavefunction unitary_step(const HermitianOperator& h, const Wavefunction& psi, double delta,
                          const PropagatorOptions& options) {
    KvnPropagator prop(h, delta, options);
    return prop.step(psi);
}

ProbabilityVector born_density(const Wavefunction& psi) {
    return ProbabilityVector(psi.grid(), psi.amplitudes().cwiseAbs2());
}

}  // namespace linrep
