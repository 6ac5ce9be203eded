#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "linrep/diagnostics.hpp"
#include "linrep/liouville.hpp"
#include "linrep/models.hpp"

using namespace linrep;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

// Nodes {0, 1, 2}.
Grid three_nodes() { return make_grid({{0, 3}}, {3}); }

}  // namespace

TEST(Moments, HandExamples) {
    const Grid g = three_nodes();
    const ProbabilityVector p(g, vec({0.2, 0.5, 0.3}));
    EXPECT_EQ(mode(p)[0], 1.0);
    EXPECT_NEAR(mean(p)[0], 1.1, 1e-15);
    EXPECT_NEAR(std_dev(p)[0], std::sqrt(0.2 * 1.21 + 0.5 * 0.01 + 0.3 * 0.81), 1e-15);

    const ProbabilityVector u(g, vec({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    EXPECT_NEAR(mean(u)[0], 1.0, 1e-15);
    EXPECT_NEAR(std_dev(u)[0], std::sqrt(2.0 / 3), 1e-15);
    EXPECT_EQ(mode(u)[0], 0.0);  // lowest index wins ties
}

TEST(Moments, DeltaHasZeroSpread) {
    const Grid g = make_grid({{-4, 4}, {-3, 3}}, {16, 12});
    const ProbabilityVector d = ProbabilityVector::delta(g, vec({1.0, -1.0}));
    EXPECT_EQ(std_dev(d), Eigen::VectorXd::Zero(2));
    EXPECT_EQ(mode(d), mean(d));
}

TEST(Moments, TwoDimensionalAxes) {
    const Grid g = make_grid({{0, 2}, {0, 3}}, {2, 3});  // x in {0,1}, y in {0,1,2}
    Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
    v[g.flatten(std::vector<Eigen::Index>{1, 2})] = 0.75;
    v[g.flatten(std::vector<Eigen::Index>{0, 0})] = 0.25;
    const ProbabilityVector p(g, v);
    EXPECT_EQ(mode(p), vec({1, 2}));
    EXPECT_NEAR(mean(p)[0], 0.75, 1e-15);
    EXPECT_NEAR(mean(p)[1], 1.5, 1e-15);
}

TEST(Moments, ModeInvariantUnderRescaling) {
    const Grid g = make_grid({{-1, 1}}, {50});
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd v(50);
        for (auto& x : v) x = u(rng);
        const ProbabilityVector p(g, v / v.sum());
        const ProbabilityVector q(g, v / v.sum() * (1 + 1e-9));
        EXPECT_EQ(mode(p), mode(q));
    }
}

TEST(PEpsilon, OpenBoxAndMonotone) {
    const Grid g = three_nodes();
    const ProbabilityVector p(g, vec({0.2, 0.5, 0.3}));
    EXPECT_EQ(p_epsilon(p, vec({1.0}), 1.0), 0.5);  // neighbours sit exactly at distance eps
    EXPECT_NEAR(p_epsilon(p, vec({1.0}), 1.01), 1.0, 1e-15);
    EXPECT_THROW(p_epsilon(p, vec({1.0}), 0.0), std::invalid_argument);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    const Grid h = make_grid({{-4, 4}, {-3, 3}}, {20, 20});
    Eigen::VectorXd v(h.size());
    for (auto& x : v) x = u(rng);
    const ProbabilityVector q(h, v / v.sum());
    double previous = 0.0;
    for (double eps = 0.05; eps < 6; eps *= 1.3) {
        const double pe = p_epsilon(q, vec({0.3, -0.7}), eps);
        EXPECT_GE(pe, previous);
        EXPECT_LE(pe, 1.0 + 1e-12);
        previous = pe;
    }
}

TEST(PEpsilon, CmeDecayConcentratesOnSolution) {
    const Grid g = make_grid({{0, 2}}, {1024});
    const SparseGenerator gen = assemble_cme(g, decay_flow());
    const auto ps = propagate_cme(gen, ProbabilityVector::delta(g, vec({1.0})), 0.01, 100, CmeMethod::Exponential);
    const double pe = p_epsilon(ps.back(), vec({0.5}), 0.05);
    EXPECT_GT(pe, 0.9);
    EXPECT_LE(pe, 1.0);
    EXPECT_NEAR(pe, 0.9969, 5e-4);  // frozen from this grid and step
}

TEST(TrajectoryErrorTest, Cases) {
    const Trajectory ref({0.0, 1.0, 2.0}, {vec({0, 0}), vec({1, 0}), vec({2, 0})});
    const Trajectory same = ref;
    const auto e0 = trajectory_error(same, ref, 0.1);
    EXPECT_EQ(e0.rmse, 0.0);
    EXPECT_EQ(e0.horizon, std::numeric_limits<double>::infinity());

    const Trajectory off({0.0, 1.0, 2.0}, {vec({0, 0}), vec({1, 0.3}), vec({2, 0.4})});
    const auto e = trajectory_error(off, ref, 0.35);
    EXPECT_NEAR(e.rmse, std::sqrt((0.09 + 0.16) / 3), 1e-15);
    EXPECT_EQ(e.horizon, 2.0);
    EXPECT_EQ(trajectory_error(off, ref, 0.2).horizon, 1.0);

    const Trajectory shifted({0.0, 1.5, 2.0}, {vec({0, 0}), vec({1, 0}), vec({2, 0})});
    EXPECT_THROW(trajectory_error(shifted, ref, 0.1), std::invalid_argument);
    const Trajectory short_dim({0.0, 1.0, 2.0}, {vec({0}), vec({1}), vec({2})});
    EXPECT_THROW(trajectory_error(short_dim, ref, 0.1), std::invalid_argument);
}

TEST(Summary, PointSamples) {
    SummaryStatistics s;
    s.epsilons = {0.1, 0.5};
    s.add_point(0.0, vec({1.0}), vec({1.05}));
    s.add_point(1.0, vec({1.0}), vec({1.3}));
    EXPECT_EQ(s.p_eps[0], (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(s.p_eps[1], (std::vector<double>{0.0, 1.0}));
    EXPECT_EQ(s.stds[1][0], 0.0);
    EXPECT_EQ(s.mode_trajectory().state(1), vec({1.0}));
}

TEST(Summary, CsvRoundTrip) {
    const Grid g = make_grid({{-4, 4}, {-3, 3}}, {16, 16});
    SummaryStatistics s;
    s.epsilons = {0.05, 0.25};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd v(g.size());
        for (auto& x : v) x = u(rng);
        s.add(0.1 * k, ProbabilityVector(g, v / v.sum()), vec({0.1 * k, -0.3}));
    }
    const auto path = std::filesystem::temp_directory_path() / "linrep_summary_roundtrip.csv";
    write_summary_csv(s, path);
    const SummaryStatistics r = read_summary_csv(path);
    std::filesystem::remove(path);
    ASSERT_EQ(r.size(), s.size());
    EXPECT_EQ(r.dim, 2u);
    EXPECT_EQ(r.epsilons, s.epsilons);
    for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_EQ(r.times[k], s.times[k]);
        EXPECT_EQ(r.modes[k], s.modes[k]);
        EXPECT_EQ(r.means[k], s.means[k]);
        EXPECT_EQ(r.stds[k], s.stds[k]);
        EXPECT_EQ(r.p_eps[k], s.p_eps[k]);
    }
}
