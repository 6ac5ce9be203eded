#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace linrep::numerics {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

/// exp(A) by scaling and squaring with a degree-13 Padé approximant.
/// Throws std::invalid_argument on non-square input and NumericalError on
/// non-finite entries.
RealMatrix expm(const RealMatrix& a);
ComplexMatrix expm(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Krylov exponential action
// ---------------------------------------------------------------------------

/// A linear map given only through its action, plus an upper bound on its
/// norm (used to pick the first Krylov substep).
template <typename Scalar>
struct LinearOperator {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Eigen::Index dim = 0;
    std::function<void(const Vector& in, Vector& out)> apply;
    double norm_bound = 0.0;
};

using RealOperator = LinearOperator<double>;
using ComplexOperator = LinearOperator<Complex>;

RealOperator make_operator(const SparseMatrix& a);
RealOperator make_operator(const RealMatrix& a);
ComplexOperator make_operator(const ComplexMatrix& a);

struct ExpmvOptions {
    double tol = 1e-10;     ///< relative to the norm of the input vector
    int krylov_dim = 30;
    int max_substeps = 100000;
    int max_rejections = 50;
};

struct ExpmvStats {
    int substeps = 0;
    int matvecs = 0;
    double error_estimate = 0.0;
};

/// exp(t*A)*v via restarted Arnoldi with local error control and
/// automatic substepping. Throws KrylovNonConvergence if the substep budget
/// is exhausted.
RealVector expmv(const RealOperator& a, const RealVector& v, double t,
                 const ExpmvOptions& options = {}, ExpmvStats* stats = nullptr);
ComplexVector expmv(const ComplexOperator& a, const ComplexVector& v, double t,
                    const ExpmvOptions& options = {}, ExpmvStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

struct LeastSquaresResult {
    RealMatrix solution;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
};

/// Minimum-norm X minimizing ||A X - B||_F through a complete orthogonal
/// decomposition. Rank deficiency is reported, never fatal.
LeastSquaresResult least_squares(const RealMatrix& a, const RealMatrix& b);

// ---------------------------------------------------------------------------
// FFT
// ---------------------------------------------------------------------------

enum class FftDirection { Forward, Inverse };

/// Unnormalized forward transform; the inverse carries the 1/N factor.
ComplexVector fft(const ComplexVector& v, FftDirection direction);

/// Batched in-place transforms along one axis of a row-major array with
/// the given shape. Plans are created once and reused.
class AxisFft {
public:
    AxisFft(std::vector<Eigen::Index> shape, std::size_t axis);
    ~AxisFft();
    AxisFft(AxisFft&&) noexcept;
    AxisFft& operator=(AxisFft&&) noexcept;
    AxisFft(const AxisFft&) = delete;
    AxisFft& operator=(const AxisFft&) = delete;

    /// Forward transform is unnormalized; inverse scales by 1/n_axis.
    void execute(ComplexVector& data, FftDirection direction) const;

    Eigen::Index size() const noexcept { return total_; }
    Eigen::Index axis_length() const noexcept { return length_; }

private:
    struct Plans;
    std::unique_ptr<Plans> plans_;
    Eigen::Index total_ = 0;
    Eigen::Index length_ = 0;
    Eigen::Index chunk_ = 0;
};

// ---------------------------------------------------------------------------
// Sparse helpers
// ---------------------------------------------------------------------------

/// y = A x with a fixed (column-major) reduction order.
RealVector multiply(const SparseMatrix& a, const RealVector& x);

}  // namespace linrep::numerics
