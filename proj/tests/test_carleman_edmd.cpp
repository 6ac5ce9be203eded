#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "linrep/carleman.hpp"
#include "linrep/edmd.hpp"
#include "linrep/models.hpp"
#include "linrep/numerics.hpp"

using namespace linrep;

namespace {

Eigen::VectorXd scalar(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

// ---------------------------------------------------------------------------
// Monomial basis
// ---------------------------------------------------------------------------

TEST(MonomialBasis, OneDimensional) {
    const MonomialBasis b = enumerate_monomials(1, 3);
    ASSERT_EQ(b.size(), 4);
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(b.exponents(k), MultiIndex{k});
}

TEST(MonomialBasis, TwoDimensionalOrder) {
    const MonomialBasis b = enumerate_monomials(2, 2);
    const std::vector<MultiIndex> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    EXPECT_EQ(b.ordering(), expected);
}

TEST(MonomialBasis, SizeIdentity) {
    for (int d = 0; d <= 49; ++d) {
        const MonomialBasis b = enumerate_monomials(2, d);
        EXPECT_EQ(b.size(), (d + 1) * (d + 2) / 2);
        std::set<MultiIndex> unique(b.ordering().begin(), b.ordering().end());
        EXPECT_EQ(static_cast<Eigen::Index>(unique.size()), b.size());
    }
    EXPECT_EQ(enumerate_monomials(2, 49).size(), 1275);
}

TEST(MonomialBasis, EvaluateAndStateReadback) {
    const MonomialBasis b = enumerate_monomials(2, 2);
    Eigen::VectorXd x(2);
    x << 3.0, -2.0;
    Eigen::VectorXd expected(6);
    expected << 1, 3, -2, 9, -6, 4;
    EXPECT_EQ(b.evaluate(x), expected);
    EXPECT_EQ(b.state_from_observables(b.evaluate(x)), x);
    EXPECT_FALSE(b.index_of({3, 0}).has_value());
}

// ---------------------------------------------------------------------------
// Lifting
// ---------------------------------------------------------------------------

TEST(LiftDecay, OrderThree) {
    const CarlemanSystem s = lift_decay(3);
    const Eigen::MatrixXd l(s.generator);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
    expected(1, 2) = -1;
    expected(2, 3) = -2;
    EXPECT_EQ(l, expected);
}

TEST(LiftDecay, OrderHundredShape) {
    const CarlemanSystem s = lift_decay(100);
    EXPECT_EQ(s.generator.rows(), 101);
    EXPECT_EQ(s.generator.cols(), 101);
    EXPECT_EQ(s.generator.nonZeros(), 99);
    EXPECT_EQ(Eigen::MatrixXd(s.generator).row(100).cwiseAbs().sum(), 0.0);
}

TEST(LiftDecay, OrderOneIsConstant) {
    const CarlemanSystem s = lift_decay(1);
    const auto times = uniform_times(0.5, 4);
    const auto lp = propagate_linear(s, scalar(0.7), times);
    const Trajectory states = lp.states(s.basis);
    for (const auto& x : states.states()) EXPECT_EQ(x[0], 0.7);
}

TEST(LiftDecay, ZeroInitialStaysAtFixedPoint) {
    const CarlemanSystem s = lift_decay(10);
    const auto times = uniform_times(0.3, 10);
    const auto lp = propagate_linear(s, scalar(0.0), times);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(11);
    e0[0] = 1.0;
    for (const auto& g : lp.observables.states()) EXPECT_EQ(g, e0);
}

TEST(LiftVdp, RowsForLowDegrees) {
    const double mu = 0.5;
    const CarlemanSystem s = lift_vdp(4, mu);
    const Eigen::MatrixXd l(s.generator);
    const auto idx = [&](int m, int n) { return *s.basis.index_of({m, n}); };
    // g10' = g01
    Eigen::VectorXd row = Eigen::VectorXd::Zero(l.cols());
    row[idx(0, 1)] = 1.0;
    EXPECT_EQ(Eigen::VectorXd(l.row(idx(1, 0)).transpose()), row);
    // g01' = -g10 + mu g01 - mu g21
    row.setZero();
    row[idx(1, 0)] = -1.0;
    row[idx(0, 1)] = mu;
    row[idx(2, 1)] = -mu;
    EXPECT_EQ(Eigen::VectorXd(l.row(idx(0, 1)).transpose()), row);
}

TEST(LiftVdp, ClosureRowsAreZero) {
    const CarlemanSystem s = lift_vdp(49, 0.5);
    EXPECT_EQ(s.generator.rows(), 1275);
    for (Eigen::Index k = 0; k < s.basis.size(); ++k) {
        const auto& e = s.basis.exponents(k);
        if (e[0] + e[1] >= 48) EXPECT_EQ(s.generator.row(k).nonZeros(), 0) << k;
    }
}

TEST(LiftVdp, MatchesFlowOnObservables) {
    // d/dt x^m y^n = grad(x^m y^n) . F; check the generator rows away from
    // the closure against that derivative at a test point.
    const double mu = 0.5;
    const CarlemanSystem s = lift_vdp(8, mu);
    Eigen::VectorXd z(2);
    z << 0.3, -0.7;
    const Eigen::VectorXd g = s.basis.evaluate(z);
    const Eigen::VectorXd lg = s.generator * g;
    const Eigen::VectorXd f = vdp_flow(mu)(z);
    for (Eigen::Index k = 0; k < s.basis.size(); ++k) {
        const int m = s.basis.exponents(k)[0];
        const int n = s.basis.exponents(k)[1];
        if (m + n >= 6) continue;
        const double dx = m ? m * std::pow(z[0], m - 1) * std::pow(z[1], n) : 0.0;
        const double dy = n ? n * std::pow(z[0], m) * std::pow(z[1], n - 1) : 0.0;
        EXPECT_NEAR(lg[k], dx * f[0] + dy * f[1], 1e-12) << m << "," << n;
    }
}

// ---------------------------------------------------------------------------
// Propagation and bounds
// ---------------------------------------------------------------------------

TEST(CarlemanBound, Values) {
    EXPECT_NEAR(carleman_error_bound(100, 0.5), 2 * std::pow(0.5, 100), 1e-45);
    EXPECT_EQ(carleman_error_bound(7, 0.0), 0.0);
    EXPECT_NEAR(carleman_error_bound(1, 0.9), 9.0, 1e-12);
    EXPECT_THROW(carleman_error_bound(3, 1.0), std::invalid_argument);
}

TEST(PropagateLinear, OrderHundredShortTime) {
    const CarlemanSystem s = lift_decay(100);
    const auto times = uniform_times(0.05, 10);
    const auto states = propagate_linear(s, scalar(1.0), times).states(s.basis);
    for (std::size_t k = 0; k < times.size(); ++k) {
        EXPECT_LE(std::abs(states.state(k)[0] - analytic_decay_solution(1.0, times[k])), 1e-3);
    }
}

TEST(PropagateLinear, OrderHundredFailsAtThree) {
    const CarlemanSystem s = lift_decay(100);
    const std::vector<double> times{0.0, 3.0};
    const auto lp = propagate_linear(s, scalar(1.0), times);
    const bool bad = lp.diverged() || std::abs(lp.states(s.basis).state(1)[0] - 0.25) >= 1.0;
    EXPECT_TRUE(bad);
}

TEST(PropagateLinear, WithinBoundBeforeOne) {
    for (int n : {5, 10, 20}) {
        const CarlemanSystem s = lift_decay(n);
        const auto times = uniform_times(0.05, 19);  // up to 0.95
        const auto states = propagate_linear(s, scalar(1.0), times).states(s.basis);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double err = std::abs(states.state(k)[0] - analytic_decay_solution(1.0, times[k]));
            EXPECT_LE(err, carleman_error_bound(n, times[k]) + 1e-9) << "n=" << n << " t=" << times[k];
        }
    }
}

TEST(Invariant, Examples) {
    EXPECT_NEAR(solve_via_invariant(1.0, 1.0), 0.5, 1e-15);
    EXPECT_EQ(solve_via_invariant(1.0, 0.0), 1.0);
    EXPECT_NEAR(solve_via_invariant(2.0, 3.0), 2.0 / 7.0, 1e-15);
}

TEST(Invariant, ExactAgainstAnalytic) {
    for (double x0 : {0.1, 0.5, 1.0, 2.0, 3.0}) {
        for (double t = 0.0; t <= 10.0; t += 0.25) {
            EXPECT_NEAR(solve_via_invariant(x0, t), analytic_decay_solution(x0, t), 1e-12);
        }
    }
}

TEST(Invariant, RoundTrip) {
    for (double x : {0.01, 0.1, 0.5, 1.0, 3.0, 50.0, 1e3}) {
        EXPECT_NEAR(invariant_inverse(invariant_observable(x)), x, 1e-13 * x * std::max(1.0, x));
    }
    EXPECT_THROW(invariant_observable(0.0), std::invalid_argument);
    EXPECT_THROW(invariant_inverse(1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// EDMD
// ---------------------------------------------------------------------------

namespace {

Trajectory decay_window() {
    const auto times = uniform_times(0.1, 30);
    std::vector<Eigen::VectorXd> s;
    for (double t : times) s.push_back(scalar(analytic_decay_solution(1.0, t)));
    return Trajectory(times, s);
}

}  // namespace

TEST(Snapshots, DecayWindow) {
    const SnapshotMatrix s = build_snapshots(decay_window(), MonomialBasis(1, 2), 0.1);
    EXPECT_EQ(s.pairs(), 30);
    EXPECT_EQ(s.x.row(0), Eigen::RowVector3d(1, 1, 1));
    EXPECT_NEAR(s.y(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(s.y(0, 1), 1 / 1.1, 1e-15);
    EXPECT_NEAR(s.y(0, 2), 1 / 1.21, 1e-15);
}

TEST(Snapshots, NonUniformSamplingRejected) {
    const Trajectory t({0.0, 0.1, 0.3}, {scalar(1), scalar(1), scalar(1)});
    EXPECT_THROW(build_snapshots(t, MonomialBasis(1, 1), 0.1), std::invalid_argument);
}

TEST(Snapshots, CsvRoundTrip) {
    const SnapshotMatrix s = build_snapshots(decay_window(), MonomialBasis(1, 2), 0.1);
    std::stringstream io;
    write_snapshots_csv(s, io);
    const SnapshotMatrix r = read_snapshots_csv(io, 0.1);
    EXPECT_EQ(r.x, s.x);
    EXPECT_EQ(r.y, s.y);
    EXPECT_TRUE(r.dictionary == s.dictionary);
}

TEST(FitKoopman, DecayMatrixMatchesDisplayedValues) {
    const KoopmanMatrix k = fit_koopman(build_snapshots(decay_window(), MonomialBasis(1, 2), 0.1));
    Eigen::Matrix3d displayed;
    displayed << 1, -0.0, 0, 0.001, 0.992, -0.084, -0.025, 0.156, 0.699;
    EXPECT_LE((k.k - displayed).cwiseAbs().maxCoeff(), 0.02);
    // Frozen from this fit (window [0, 3], 30 pairs); agrees with the
    // displayed matrix to its three printed decimals.
    EXPECT_NEAR(k.k(1, 1), 0.99155, 1e-4);
    EXPECT_NEAR(k.k(1, 2), -0.08400, 1e-4);
    EXPECT_NEAR(k.k(2, 1), 0.15576, 1e-4);
    EXPECT_NEAR(k.k(2, 2), 0.69870, 1e-4);
}

TEST(FitKoopman, LinearSystemIsExact) {
    // x' = -x: span{1, x} is invariant, K = diag(1, exp(-delta)).
    const double delta = 0.1;
    const auto times = uniform_times(delta, 20);
    std::vector<Eigen::VectorXd> s;
    for (double t : times) s.push_back(scalar(1.5 * std::exp(-t)));
    const KoopmanMatrix k = fit_koopman(build_snapshots(Trajectory(times, s), MonomialBasis(1, 1), delta));
    EXPECT_NEAR(k.k(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(k.k(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(k.k(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(k.k(1, 1), std::exp(-delta), 1e-12);
}

TEST(FitKoopman, InvariantSubspaceOfLinearSystemMatchesExpm) {
    // x' = A x on R^2; quadratic monomials span an invariant subspace whose
    // generator follows from A. Oracle: expm of that generator.
    Eigen::Matrix2d a;
    a << -0.3, 1.0, -1.0, -0.2;
    const double delta = 0.05;
    const MonomialBasis dict(2, 2);
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(6, 6);
    for (Eigen::Index k = 0; k < dict.size(); ++k) {
        const auto& e = dict.exponents(k);
        for (int i = 0; i < 2; ++i) {
            if (e[i] == 0) continue;
            for (int j = 0; j < 2; ++j) {
                MultiIndex f = e;
                f[i] -= 1;
                f[j] += 1;
                gen(k, *dict.index_of(f)) += e[i] * a(i, j);
            }
        }
    }
    const Eigen::MatrixXd exact = numerics::expm(Eigen::MatrixXd(delta * gen));
    const auto times = uniform_times(delta, 60);
    std::vector<Eigen::VectorXd> states;
    for (double t : times) states.push_back(numerics::expm(Eigen::MatrixXd(t * a)) * Eigen::Vector2d(1.0, 0.5));
    // Two trajectories so the quadratic monomials are linearly independent.
    std::vector<Eigen::VectorXd> states2;
    for (double t : times) states2.push_back(numerics::expm(Eigen::MatrixXd(t * a)) * Eigen::Vector2d(-0.4, 1.2));
    SnapshotMatrix s1 = build_snapshots(Trajectory(times, states), dict, delta);
    const SnapshotMatrix s2 = build_snapshots(Trajectory(times, states2), dict, delta);
    SnapshotMatrix both{dict, Eigen::MatrixXd(s1.pairs() * 2, 6), Eigen::MatrixXd(s1.pairs() * 2, 6), delta};
    both.x << s1.x, s2.x;
    both.y << s1.y, s2.y;
    const KoopmanMatrix k = fit_koopman(both);
    EXPECT_LE((k.k - exact).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitKoopman, ConstantDataGivesIdentityOnSpan) {
    const auto times = uniform_times(0.1, 5);
    const std::vector<Eigen::VectorXd> s(times.size(), scalar(0.8));
    const SnapshotMatrix snaps = build_snapshots(Trajectory(times, s), MonomialBasis(1, 2), 0.1);
    EXPECT_EQ(snaps.x, snaps.y);
    const KoopmanMatrix k = fit_koopman(snaps);
    EXPECT_TRUE(k.rank_deficient());
    const Eigen::VectorXd g = MonomialBasis(1, 2).evaluate(scalar(0.8));
    EXPECT_LE((k.k * g - g).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitKoopman, ResidualBeatsIdentity) {
    const SnapshotMatrix s = build_snapshots(decay_window(), MonomialBasis(1, 2), 0.1);
    const KoopmanMatrix k = fit_koopman(s);
    EXPECT_LE(fit_residual(s, k.k), fit_residual(s, Eigen::MatrixXd::Identity(3, 3)));
}

TEST(FitKoopman, RidgeShrinks) {
    const SnapshotMatrix s = build_snapshots(decay_window(), MonomialBasis(1, 2), 0.1);
    EXPECT_LT(fit_koopman(s, 10.0).k.norm(), fit_koopman(s).k.norm());
    EXPECT_THROW(fit_koopman(s, -1.0), std::invalid_argument);
}

TEST(PredictRecursive, StepZeroAndIdentity) {
    const MonomialBasis dict(1, 2);
    const KoopmanMatrix id{Eigen::MatrixXd::Identity(3, 3), 0.1, dict, 3};
    const Trajectory p = predict_recursive(id, scalar(0.6), 10);
    EXPECT_EQ(p.state(0), dict.evaluate(scalar(0.6)));
    for (const auto& g : p.states()) EXPECT_EQ(g, dict.evaluate(scalar(0.6)));
    EXPECT_NEAR(p.times().back(), 1.0, 1e-15);
}

TEST(PredictRecursive, EdmdBeatsCarlemanOnDecay) {
    const KoopmanMatrix k = fit_koopman(build_snapshots(decay_window(), MonomialBasis(1, 2), 0.1));
    const Trajectory p = predict_recursive(k, scalar(1.0), 30);
    const CarlemanSystem c = lift_decay(100);
    const auto lp = propagate_linear(c, scalar(1.0), p.times());
    const Trajectory cs = lp.states(c.basis);
    double e_edmd = 0.0, e_carl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double truth = analytic_decay_solution(1.0, p.time(i));
        e_edmd = std::max(e_edmd, std::abs(k.dictionary.state_from_observables(p.state(i))[0] - truth));
        if (i < cs.size()) e_carl = std::max(e_carl, std::abs(cs.state(i)[0] - truth));
    }
    if (lp.diverged()) e_carl = std::numeric_limits<double>::infinity();
    EXPECT_LT(e_edmd, 0.05);
    EXPECT_LT(e_edmd, e_carl);
}
