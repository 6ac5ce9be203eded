#include "linrep/liouville.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "linrep/csv.hpp"
#include "linrep/errors.hpp"

namespace linrep {

namespace {

// Upwind hopping rates of every node, one entry per axis direction. Both
// the generator and the flux scheme read from this table so the two
// discretizations share their arithmetic exactly.
struct HopTable {
    // rate[a][i] > 0 means a hop from node i along axis a in direction
    // dir[a][i] (+1 or -1); dropped hops have rate 0.
    std::vector<Eigen::VectorXd> rate;
    std::vector<std::vector<int>> dir;
    Eigen::VectorXd diagonal;
};

HopTable hop_table(const Grid& grid, const FlowField& flow) {
    if (static_cast<int>(grid.dim()) != flow.dim()) {
        throw std::invalid_argument("assemble_cme: grid and flow dimensions differ");
    }
    const std::size_t dim = grid.dim();
    const Eigen::Index n = grid.size();
    HopTable t;
    t.rate.assign(dim, Eigen::VectorXd::Zero(n));
    t.dir.assign(dim, std::vector<int>(static_cast<std::size_t>(n), 0));
    t.diagonal = Eigen::VectorXd::Zero(n);

    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    Eigen::VectorXd f(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < n; ++i) {
        x = grid.point(i);
        flow.evaluate(std::span<const double>(x.data(), dim), std::span<double>(f.data(), dim));
        const auto multi = grid.unflatten(i);
        double out = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            const double fa = f[static_cast<Eigen::Index>(a)];
            if (!std::isfinite(fa)) throw std::invalid_argument("assemble_cme: flow is not finite on the grid");
            if (fa == 0.0) continue;
            const int d = fa > 0.0 ? 1 : -1;
            const Eigen::Index target = multi[a] + d;
            if (target < 0 || target >= grid.axis(a).points) continue;  // confined: hop dropped
            const double r = std::abs(fa) / grid.spacing(a);
            t.rate[a][i] = r;
            t.dir[a][static_cast<std::size_t>(i)] = d;
            out += r;
        }
        t.diagonal[i] = -out;
    }
    return t;
}

Eigen::Index neighbor(const Grid& grid, Eigen::Index i, std::size_t axis, int d) {
    auto multi = grid.unflatten(i);
    multi[axis] += d;
    return grid.flatten(multi);
}

SparseGenerator build_generator(const Grid& grid, const FlowField& flow) {
    const HopTable t = hop_table(grid, flow);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(grid.size()) * (grid.dim() + 1));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (t.diagonal[i] != 0.0) entries.emplace_back(i, i, t.diagonal[i]);
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const int d = t.dir[a][static_cast<std::size_t>(i)];
            if (d != 0) entries.emplace_back(neighbor(grid, i, a, d), i, t.rate[a][i]);
        }
    }
    numerics::SparseMatrix m(grid.size(), grid.size());
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return SparseGenerator(grid, std::move(m));
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseGenerator
// ---------------------------------------------------------------------------

SparseGenerator::SparseGenerator(Grid grid, numerics::SparseMatrix matrix)
    : grid_(std::move(grid)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != grid_.size() || matrix_.cols() != grid_.size()) {
        throw std::invalid_argument("SparseGenerator: matrix does not match grid");
    }
}

double SparseGenerator::column_sum_residual() const {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < matrix_.outerSize(); ++c) {
        double s = 0.0;
        for (numerics::SparseMatrix::InnerIterator it(matrix_, c); it; ++it) s += it.value();
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

double SparseGenerator::min_offdiagonal() const {
    double lowest = 0.0;
    bool any = false;
    for (Eigen::Index c = 0; c < matrix_.outerSize(); ++c) {
        for (numerics::SparseMatrix::InnerIterator it(matrix_, c); it; ++it) {
            if (it.row() == it.col()) continue;
            lowest = any ? std::min(lowest, it.value()) : it.value();
            any = true;
        }
    }
    return lowest;
}

double SparseGenerator::max_diagonal() const {
    double highest = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dim(); ++i) highest = std::max(highest, matrix_.coeff(i, i));
    return dim() ? highest : 0.0;
}

double SparseGenerator::max_exit_rate() const {
    double r = 0.0;
    for (Eigen::Index i = 0; i < dim(); ++i) r = std::max(r, std::abs(matrix_.coeff(i, i)));
    return r;
}

void SparseGenerator::write_coo_csv(std::ostream& out) const {
    out << "row,col,value\n";
    for (Eigen::Index c = 0; c < matrix_.outerSize(); ++c) {
        for (numerics::SparseMatrix::InnerIterator it(matrix_, c); it; ++it) {
            out << it.row() << ',' << it.col() << ',' << csv::format(it.value()) << '\n';
        }
    }
}

void SparseGenerator::write_coo_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_coo_csv(out);
}

SparseGenerator assemble_cme_1d(const Grid& grid, const FlowField& flow) {
    if (grid.dim() != 1) throw std::invalid_argument("assemble_cme_1d: grid must be one-dimensional");
    return build_generator(grid, flow);
}

SparseGenerator assemble_cme_2d(const Grid& grid, const FlowField& flow) {
    if (grid.dim() != 2) throw std::invalid_argument("assemble_cme_2d: grid must be two-dimensional");
    return build_generator(grid, flow);
}

SparseGenerator assemble_cme(const Grid& grid, const FlowField& flow) {
    return grid.dim() == 1 ? assemble_cme_1d(grid, flow) : assemble_cme_2d(grid, flow);
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

CmePropagator::CmePropagator(const SparseGenerator& generator, double delta, CmeMethod method,
                             CmeOptions options)
    : generator_(&generator), delta_(delta), method_(method), options_(options) {
    if (!(delta > 0.0)) throw std::invalid_argument("CmePropagator: delta must be positive");
    if (method == CmeMethod::ForwardEuler) {
        const double courant = delta * generator.max_exit_rate();
        if (courant > 1.0) throw CflViolation(courant);
    } else if (generator.dim() <= options_.dense_threshold) {
        propagator_ = numerics::expm(Eigen::MatrixXd(delta * Eigen::MatrixXd(generator.matrix())));
    }
}

ProbabilityVector CmePropagator::step(const ProbabilityVector& p) const {
    if (!(p.grid() == generator_->grid())) throw std::invalid_argument("CmePropagator: grid mismatch");
    Eigen::VectorXd next;
    if (method_ == CmeMethod::ForwardEuler) {
        next = p.values() + delta_ * numerics::multiply(generator_->matrix(), p.values());
    } else if (propagator_) {
        next.noalias() = *propagator_ * p.values();
    } else {
        numerics::ExpmvOptions opt;
        opt.tol = options_.krylov_tol;
        opt.krylov_dim = options_.krylov_dim;
        next = numerics::expmv(numerics::make_operator(generator_->matrix()), p.values(), delta_, opt);
    }
    return ProbabilityVector(p.grid(), std::move(next));
}

std::vector<ProbabilityVector> propagate_cme(const SparseGenerator& generator, const ProbabilityVector& p0,
                                             double delta, long steps, CmeMethod method, const CmeOptions& options) {
    if (steps < 0) throw std::invalid_argument("propagate_cme: steps must be nonnegative");
    CmePropagator prop(generator, delta, method, options);
    std::vector<ProbabilityVector> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    out.push_back(p0);
    for (long s = 0; s < steps; ++s) out.push_back(prop.step(out.back()));
    return out;
}

double cfl_time_step(const SparseGenerator& generator, double safety) {
    if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("cfl_time_step: safety must be in (0, 1]");
    const double r = generator.max_exit_rate();
    return r > 0.0 ? safety / r : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Flux form
// ---------------------------------------------------------------------------

UpwindScheme2d::UpwindScheme2d(const Grid& grid, const FlowField& flow) : grid_(grid) {
    if (grid.dim() != 2) throw std::invalid_argument("UpwindScheme2d: grid must be two-dimensional");
    const HopTable t = hop_table(grid, flow);
    const Eigen::Index n = grid.size();
    right_ = left_ = up_ = down_ = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        (t.dir[0][k] > 0 ? right_ : left_)[i] = t.rate[0][i];
        (t.dir[1][k] > 0 ? up_ : down_)[i] = t.rate[1][i];
    }
    max_exit_rate_ = (-t.diagonal).maxCoeff();
    diagonal_ = t.diagonal;
}

ProbabilityVector UpwindScheme2d::step(const ProbabilityVector& rho, double delta) const {
    if (!(rho.grid() == grid_)) throw std::invalid_argument("UpwindScheme2d: grid mismatch");
    if (!(delta > 0.0)) throw std::invalid_argument("UpwindScheme2d: delta must be positive");
    const double courant = delta * max_exit_rate_;
    if (courant > 1.0) throw CflViolation(courant);

    const Eigen::Index nx = grid_.axis(0).points;
    const Eigen::Index ny = grid_.axis(1).points;
    const Eigen::VectorXd& p = rho.values();
    Eigen::VectorXd next(p.size());
    // Net flux into cell (a, b). The five contributions are accumulated in
    // increasing order of the donor's flattened index: the right-passing
    // x-flux through the left face, the up-passing y-flux through the lower
    // face, the cell's own outflow, the down-passing y-flux through the
    // upper face and the left-passing x-flux through the right face.
    auto add = [](double& acc, double rate, double mass) {
        if (mass != 0.0) acc += rate * mass;
    };
    for (Eigen::Index a = 0; a < nx; ++a) {
        for (Eigen::Index b = 0; b < ny; ++b) {
            const Eigen::Index i = a * ny + b;
            double net = 0.0;
            if (a > 0) add(net, right_[i - ny], p[i - ny]);
            if (b > 0) add(net, up_[i - 1], p[i - 1]);
            add(net, diagonal_[i], p[i]);
            if (b + 1 < ny) add(net, down_[i + 1], p[i + 1]);
            if (a + 1 < nx) add(net, left_[i + ny], p[i + ny]);
            next[i] = p[i] + delta * net;
        }
    }
    return ProbabilityVector(grid_, std::move(next));
}

ProbabilityVector upwind_step_2d(const ProbabilityVector& rho, const Grid& grid, const FlowField& flow, double delta) {
    return UpwindScheme2d(grid, flow).step(rho, delta);
}

}  // namespace linrep
