#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

#include "linrep/carleman.hpp"
#include "linrep/models.hpp"

namespace linrep {

/// Dictionary evaluations at consecutive samples: row k of X is g(x(t_k)),
/// row k of Y is g(x(t_k + delta)).
struct SnapshotMatrix {
    MonomialBasis dictionary;
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
    double delta = 0.0;

    Eigen::Index pairs() const noexcept { return x.rows(); }
};

/// One-step Koopman approximation, g(t + delta) ~ K g(t).
struct KoopmanMatrix {
    Eigen::MatrixXd k;
    double delta = 0.0;
    MonomialBasis dictionary;
    Eigen::Index rank = 0;  ///< numerical rank of the snapshot matrix X

    bool rank_deficient() const noexcept { return rank < k.rows(); }
};

/// Requires uniform sampling at spacing `delta` (relative tolerance 1e-9).
SnapshotMatrix build_snapshots(const Trajectory& trajectory, const MonomialBasis& dictionary, double delta);

/// K = argmin ||X K^T - Y||_F through an orthogonal factorization. A
/// positive `ridge` adds Tikhonov regularization ridge * ||K||_F^2.
KoopmanMatrix fit_koopman(const SnapshotMatrix& snapshots, double ridge = 0.0);

/// ||X K^T - Y||_F for any candidate K.
double fit_residual(const SnapshotMatrix& snapshots, const Eigen::MatrixXd& k);

/// g_0 = dictionary(x0), g_{k+1} = K g_k, sampled at t = k * delta.
Trajectory predict_recursive(const KoopmanMatrix& koopman, const Eigen::VectorXd& x0, long steps);

/// CSV with one row per snapshot pair: dictionary values of X then Y. The
/// header names each column by its exponents, e.g. X_2 or Y_1_0.
void write_snapshots_csv(const SnapshotMatrix& snapshots, std::ostream& out);
void write_snapshots_csv(const SnapshotMatrix& snapshots, const std::filesystem::path& path);
SnapshotMatrix read_snapshots_csv(std::istream& in, double delta);
SnapshotMatrix read_snapshots_csv(const std::filesystem::path& path, double delta);

}  // namespace linrep
