#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "linrep/grid.hpp"
#include "linrep/models.hpp"
#include "linrep/numerics.hpp"
#include "linrep/probability.hpp"

namespace linrep {

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::ComplexVector;

/// Complex amplitudes on a grid with unit l2 norm.
class Wavefunction {
public:
    Wavefunction() = default;
    /// Throws std::invalid_argument unless ||amplitudes|| = 1 within 1e-10.
    Wavefunction(Grid grid, ComplexVector amplitudes);
    /// Rescales to unit norm; throws on the zero vector.
    static Wavefunction normalized(Grid grid, ComplexVector amplitudes);

    const Grid& grid() const noexcept { return grid_; }
    const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
    double norm() const { return amplitudes_.norm(); }

private:
    Grid grid_;
    ComplexVector amplitudes_;
};

/// Self-adjoint operator on grid functions, held either as a dense matrix
/// or as a matrix-free action with a norm bound.
class HermitianOperator {
public:
    using Action = std::function<void(const ComplexVector& in, ComplexVector& out)>;

    static HermitianOperator dense(Grid grid, ComplexMatrix matrix);
    static HermitianOperator matrix_free(Grid grid, Action action, double norm_bound);

    const Grid& grid() const noexcept { return grid_; }
    Eigen::Index dim() const noexcept { return grid_.size(); }
    bool is_dense() const noexcept { return matrix_.has_value(); }
    /// Throws std::logic_error for matrix-free operators.
    const ComplexMatrix& matrix() const;
    double norm_bound() const noexcept { return norm_bound_; }

    ComplexVector apply(const ComplexVector& v) const;
    void apply(const ComplexVector& v, ComplexVector& out) const;

    /// Column-by-column materialization.
    ComplexMatrix to_dense() const;
    HermitianOperator densified() const;

    /// v -> scale * H v, for exponential integrators.
    numerics::ComplexOperator scaled(Complex scale) const;

private:
    HermitianOperator() = default;

    Grid grid_;
    std::optional<ComplexMatrix> matrix_;
    Action action_;
    double norm_bound_ = 0.0;
};

/// Dense: max |H - H^dagger|. Matrix-free: max over random probe pairs of
/// |<u, H v> - <H u, v>| with unit u, v (fixed seed, reproducible).
double hermiticity_residual(const HermitianOperator& h, int probes = 4);

/// P = -i d/dx_axis by FFT differentiation on the periodic grid; the
/// Nyquist wavenumber is zeroed so the symbol is real.
HermitianOperator spectral_derivative(const Grid& grid, std::size_t axis);

/// Angular wavenumbers in FFT order for one axis (Nyquist set to zero).
Eigen::VectorXd wavenumbers(const Axis& axis);

/// H = 1/2 sum_j (P_j diag(F_j) + diag(F_j) P_j), matrix-free.
HermitianOperator assemble_kvn_hamiltonian(const Grid& grid, const FlowField& flow);

/// Unit amplitude on the node nearest `point`.
Wavefunction delta_initial(const Grid& grid, const Eigen::VectorXd& point);

/// Real Gaussian amplitude truncated to `support_points` nodes per axis
/// around the node nearest `center`, then normalized. The amplitude
/// standard deviation is one third of the support half-width, so the
/// profile has fallen to about 1% at the edge of the support. Odd counts
/// are centred on that node, even counts on the midpoint just below it.
Wavefunction gaussian_initial(const Grid& grid, const Eigen::VectorXd& center, int support_points);

struct PropagatorOptions {
    /// Grids up to this many nodes use a precomputed dense propagator.
    Eigen::Index dense_threshold = 2048;
    double krylov_tol = 1e-10;
    int krylov_dim = 30;
    bool renormalize = true;
    /// Renormalize only when |norm - 1| exceeds this.
    double renormalize_threshold = 1e-12;
};

/// Repeated application of exp(-i H delta).
class KvnPropagator {
public:
    KvnPropagator(const HermitianOperator& h, double delta, PropagatorOptions options = {});

    Wavefunction step(const Wavefunction& psi);

    bool uses_dense() const noexcept { return propagator_.has_value(); }
    double delta() const noexcept { return delta_; }
    /// Largest |norm - 1| observed right after a step, before any correction.
    double max_norm_drift() const noexcept { return max_drift_; }
    long renormalizations() const noexcept { return renormalizations_; }

private:
    HermitianOperator h_;
    double delta_;
    PropagatorOptions options_;
    std::optional<ComplexMatrix> propagator_;
    double max_drift_ = 0.0;
    long renormalizations_ = 0;
};

/// One step psi -> exp(-i H delta) psi.
Wavefunction unitary_step(const HermitianOperator& h, const Wavefunction& psi, double delta,
                          const PropagatorOptions& options = {});

/// p_i = |psi_i|^2
ProbabilityVector born_density(const Wavefunction& psi);

}  // namespace linrep
