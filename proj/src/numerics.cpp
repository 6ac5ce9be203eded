#include "linrep/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "linrep/errors.hpp"

namespace linrep::numerics {

namespace {

template <typename Matrix>
Matrix expm_impl(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
    if (!a.allFinite()) throw NumericalError("expm: matrix has non-finite entries");
    if (a.rows() == 0) return a;
    Matrix result = a.exp();
    if (!result.allFinite()) throw NumericalError("expm: result overflowed");
    return result;
}

// Rounds a step size up to two significant digits, as Expokit does, so the
// substep sequence is insensitive to last-bit noise.
double round_step(double step) {
    const double s = std::pow(10.0, std::floor(std::log10(step)) - 1.0);
    return std::ceil(step / s) * s;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expmv_impl(const LinearOperator<Scalar>& op,
                                                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v,
                                                    double t, const ExpmvOptions& opt,
                                                    ExpmvStats* stats) {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    if (v.size() != op.dim) throw std::invalid_argument("expmv: dimension mismatch");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("expmv: tolerance must be positive");

    ExpmvStats local;
    ExpmvStats& st = stats ? *stats : local;
    st = {};

    const double v_norm = v.norm();
    if (v_norm == 0.0 || t == 0.0) return v;

    const Eigen::Index n = op.dim;
    const int m = static_cast<int>(std::min<Eigen::Index>(opt.krylov_dim, n));
    const double anorm = std::max(op.norm_bound, std::numeric_limits<double>::min());
    const double tol = opt.tol;
    const double btol = 1e-7;
    const double gamma = 0.9;
    const double delta = 1.2;
    const double t_out = std::abs(t);
    const double sgn = t < 0.0 ? -1.0 : 1.0;
    const double rndoff = anorm * std::numeric_limits<double>::epsilon();

    // Work on the unit vector so `tol` is relative.
    Vector w = v / v_norm;
    double beta = 1.0;

    const double mp1 = static_cast<double>(m + 1);
    const double fact = std::pow(mp1 / std::numbers::e, mp1) * std::sqrt(2.0 * std::numbers::pi * mp1);
    double xm = 1.0 / m;
    double t_new = round_step((1.0 / anorm) * std::pow((fact * tol) / (4.0 * beta * anorm), xm));
    double t_now = 0.0;

    Matrix basis(n, m + 1);
    Matrix hess(m + 2, m + 2);
    Vector p(n);

    while (t_now < t_out) {
        if (++st.substeps > opt.max_substeps) {
            throw KrylovNonConvergence("expmv: exceeded " + std::to_string(opt.max_substeps) +
                                       " substeps at t=" + std::to_string(t_now));
        }
        double t_step = std::min(t_out - t_now, t_new);

        basis.col(0) = w / beta;
        hess.setZero();
        int mb = m;
        int k1 = 2;
        for (int j = 0; j < m; ++j) {
            op.apply(basis.col(j), p);
            ++st.matvecs;
            for (int i = 0; i <= j; ++i) {
                hess(i, j) = basis.col(i).dot(p);
                p -= hess(i, j) * basis.col(i);
            }
            const double s = p.norm();
            if (s < btol) {
                // Invariant subspace found: the projection is exact.
                k1 = 0;
                mb = j + 1;
                t_step = t_out - t_now;
                break;
            }
            hess(j + 1, j) = s;
            basis.col(j + 1) = p / s;
        }
        double avnorm = 0.0;
        if (k1 != 0) {
            hess(m + 1, m) = 1.0;
            op.apply(basis.col(m), p);
            ++st.matvecs;
            avnorm = p.norm();
        }

        Matrix f;
        double err_loc = 0.0;
        for (int rejections = 0;; ++rejections) {
            const int mx = mb + k1;
            f = expm_impl<Matrix>((sgn * t_step) * hess.topLeftCorner(mx, mx));
            if (k1 == 0) {
                err_loc = btol;
                break;
            }
            const double phi1 = std::abs(beta * f(m, 0));
            const double phi2 = std::abs(beta * f(m + 1, 0) * avnorm);
            if (phi1 > 10.0 * phi2) {
                err_loc = phi2;
                xm = 1.0 / m;
            } else if (phi1 > phi2) {
                err_loc = (phi1 * phi2) / (phi1 - phi2);
                xm = 1.0 / m;
            } else {
                err_loc = phi1;
                xm = 1.0 / (m - 1);
            }
            if (err_loc <= delta * t_step * tol) break;
            if (rejections >= opt.max_rejections) {
                throw KrylovNonConvergence("expmv: local error tolerance unreachable at t=" +
                                           std::to_string(t_now));
            }
            t_step = round_step(gamma * t_step * std::pow(t_step * tol / err_loc, xm));
        }

        const int mx = mb + std::max(0, k1 - 1);
        w = basis.leftCols(mx) * (beta * f.col(0).head(mx));
        beta = w.norm();
        t_now += t_step;
        t_new = round_step(gamma * t_step * std::pow(t_step * tol / err_loc, xm));
        st.error_estimate += std::max(err_loc, rndoff);
        if (!w.allFinite()) throw NumericalError("expmv: non-finite iterate");
    }
    return w * v_norm;
}

}  // namespace

RealMatrix expm(const RealMatrix& a) { return expm_impl(a); }
ComplexMatrix expm(const ComplexMatrix& a) { return expm_impl(a); }

RealOperator make_operator(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("make_operator: matrix must be square");
    RealOperator op;
    op.dim = a.rows();
    double norm1 = 0.0;
    for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(a, c); it; ++it) col += std::abs(it.value());
        norm1 = std::max(norm1, col);
    }
    op.norm_bound = norm1;
    op.apply = [&a](const RealVector& in, RealVector& out) { out = multiply(a, in); };
    return op;
}

RealOperator make_operator(const RealMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("make_operator: matrix must be square");
    RealOperator op;
    op.dim = a.rows();
    op.norm_bound = a.cwiseAbs().colwise().sum().maxCoeff();
    op.apply = [&a](const RealVector& in, RealVector& out) { out.noalias() = a * in; };
    return op;
}

ComplexOperator make_operator(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("make_operator: matrix must be square");
    ComplexOperator op;
    op.dim = a.rows();
    op.norm_bound = a.cwiseAbs().colwise().sum().maxCoeff();
    op.apply = [&a](const ComplexVector& in, ComplexVector& out) { out.noalias() = a * in; };
    return op;
}

RealVector expmv(const RealOperator& a, const RealVector& v, double t, const ExpmvOptions& options,
                 ExpmvStats* stats) {
    return expmv_impl(a, v, t, options, stats);
}

ComplexVector expmv(const ComplexOperator& a, const ComplexVector& v, double t,
                    const ExpmvOptions& options, ExpmvStats* stats) {
    return expmv_impl(a, v, t, options, stats);
}

LeastSquaresResult least_squares(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("least_squares: row counts differ");
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(a);
    LeastSquaresResult result;
    result.solution = cod.solve(b);
    result.rank = cod.rank();
    result.rank_deficient = result.rank < std::min(a.rows(), a.cols());
    return result;
}

// ---------------------------------------------------------------------------
// FFT (FFTW backend)
// ---------------------------------------------------------------------------

struct AxisFft::Plans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    ~Plans() {
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }
};

AxisFft::AxisFft(std::vector<Eigen::Index> shape, std::size_t axis) {
    if (axis >= shape.size()) throw std::invalid_argument("AxisFft: axis out of range");
    total_ = 1;
    for (auto s : shape) {
        if (s <= 0) throw std::invalid_argument("AxisFft: shape entries must be positive");
        total_ *= s;
    }
    length_ = shape[axis];
    Eigen::Index stride = 1;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
    chunk_ = length_ * stride;
    // Row-major layout: one plan transforms the `stride` interleaved lines of
    // a contiguous chunk; execute() walks the chunks.
    const int n = static_cast<int>(length_);
    const int howmany = static_cast<int>(stride);
    const int istride = static_cast<int>(stride);
    const int idist = 1;

    ComplexVector scratch(length_ * stride);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    plans_ = std::make_unique<Plans>();
    plans_->forward = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, istride, idist, buf, nullptr,
                                         istride, idist, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->inverse = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, istride, idist, buf, nullptr,
                                         istride, idist, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->forward || !plans_->inverse) throw std::runtime_error("AxisFft: FFTW planning failed");
}

AxisFft::~AxisFft() = default;
AxisFft::AxisFft(AxisFft&&) noexcept = default;
AxisFft& AxisFft::operator=(AxisFft&&) noexcept = default;

void AxisFft::execute(ComplexVector& data, FftDirection direction) const {
    if (data.size() != total_) throw std::invalid_argument("AxisFft: data size mismatch");
    const fftw_plan plan = direction == FftDirection::Forward ? plans_->forward : plans_->inverse;
    for (Eigen::Index offset = 0; offset < total_; offset += chunk_) {
        auto* ptr = reinterpret_cast<fftw_complex*>(data.data() + offset);
        fftw_execute_dft(plan, ptr, ptr);
    }
    if (direction == FftDirection::Inverse) data /= static_cast<double>(length_);
}

ComplexVector fft(const ComplexVector& v, FftDirection direction) {
    AxisFft plan({v.size()}, 0);
    ComplexVector out = v;
    plan.execute(out, direction);
    return out;
}

RealVector multiply(const SparseMatrix& a, const RealVector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("multiply: dimension mismatch");
    RealVector y = RealVector::Zero(a.rows());
    for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
        const double xc = x[c];
        if (xc == 0.0) continue;
        for (SparseMatrix::InnerIterator it(a, c); it; ++it) y[it.row()] += it.value() * xc;
    }
    return y;
}

}  // namespace linrep::numerics
