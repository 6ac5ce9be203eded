#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "linrep/grid.hpp"
#include "linrep/models.hpp"
#include "linrep/numerics.hpp"
#include "linrep/probability.hpp"

namespace linrep {

/// Markov generator of the upwind random walk on a grid. Column j holds
/// the rates out of node j; the diagonal is minus their sum.
class SparseGenerator {
public:
    SparseGenerator() = default;
    SparseGenerator(Grid grid, numerics::SparseMatrix matrix);

    const Grid& grid() const noexcept { return grid_; }
    const numerics::SparseMatrix& matrix() const noexcept { return matrix_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

    /// max_j |sum_i L_ij|
    double column_sum_residual() const;
    /// Smallest off-diagonal entry (0 if there are none).
    double min_offdiagonal() const;
    /// Largest diagonal entry (should be <= 0).
    double max_diagonal() const;
    /// max_j |L_jj|, the fastest exit rate.
    double max_exit_rate() const;

    /// Coordinate list with header row,col,value, column-major order.
    void write_coo_csv(std::ostream& out) const;
    void write_coo_csv(const std::filesystem::path& path) const;

private:
    Grid grid_;
    numerics::SparseMatrix matrix_;
};

/// Rate |F(x_j)|/dx from node j toward sign(F). A move that would leave the
/// grid is dropped and not counted in the diagonal, so mass stays put.
SparseGenerator assemble_cme_1d(const Grid& grid, const FlowField& flow);

/// Same rule per axis on a 2D grid: |F_x|/dx along x and |F_y|/dy along y.
SparseGenerator assemble_cme_2d(const Grid& grid, const FlowField& flow);

/// Dispatches on grid dimension.
SparseGenerator assemble_cme(const Grid& grid, const FlowField& flow);

enum class CmeMethod { Exponential, ForwardEuler };

struct CmeOptions {
    /// Exponential method: grids up to this size use a dense propagator.
    Eigen::Index dense_threshold = 2048;
    double krylov_tol = 1e-10;
    int krylov_dim = 30;
};

/// Repeated p -> exp(delta L) p or p -> p + delta L p. Keeps a reference
/// to the generator, which must outlive the propagator.
class CmePropagator {
public:
    /// Throws CflViolation for forward Euler when delta * max exit rate > 1.
    CmePropagator(const SparseGenerator& generator, double delta, CmeMethod method, CmeOptions options = {});

    ProbabilityVector step(const ProbabilityVector& p) const;

    CmeMethod method() const noexcept { return method_; }
    bool uses_dense() const noexcept { return propagator_.has_value(); }
    double delta() const noexcept { return delta_; }

private:
    const SparseGenerator* generator_;
    double delta_;
    CmeMethod method_;
    CmeOptions options_;
    std::optional<Eigen::MatrixXd> propagator_;
};

/// p0 followed by `steps` propagated states.
std::vector<ProbabilityVector> propagate_cme(const SparseGenerator& generator, const ProbabilityVector& p0,
                                             double delta, long steps, CmeMethod method, const CmeOptions& options = {});

/// Largest forward-Euler step allowed by the CFL condition, times 0.9.
double cfl_time_step(const SparseGenerator& generator, double safety = 0.9);

/// Explicit flux-difference update on a 2D grid. Interface fluxes are split
/// into right- and left-passing parts taken from the upwind cell; fluxes
/// through the outer boundary are zero.
class UpwindScheme2d {
public:
    UpwindScheme2d(const Grid& grid, const FlowField& flow);

    /// Throws CflViolation when delta violates the CFL condition.
    ProbabilityVector step(const ProbabilityVector& rho, double delta) const;

    double max_exit_rate() const noexcept { return max_exit_rate_; }

private:
    Grid grid_;
    // Per node: rate toward +x, -x, +y, -y (already zero where the
    // neighbor is outside the grid).
    Eigen::VectorXd right_, left_, up_, down_;
    Eigen::VectorXd diagonal_;
    double max_exit_rate_ = 0.0;
};

ProbabilityVector upwind_step_2d(const ProbabilityVector& rho, const Grid& grid, const FlowField& flow, double delta);

}  // namespace linrep
