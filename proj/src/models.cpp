#include "linrep/models.hpp"

#include <cmath>
#include <stdexcept>

#include "linrep/errors.hpp"
#include "linrep/ode.hpp"

namespace linrep {

FlowField::FlowField(std::string name, std::vector<std::vector<PolynomialTerm>> components,
                     Evaluator evaluator)
    : name_(std::move(name)), components_(std::move(components)), evaluator_(std::move(evaluator)) {
    if (components_.empty()) throw std::invalid_argument("FlowField: dimension must be at least 1");
    for (const auto& comp : components_) {
        for (const auto& term : comp) {
            if (term.exponents.size() != components_.size()) {
                throw std::invalid_argument("FlowField: term arity does not match dimension");
            }
            for (int e : term.exponents) {
                if (e < 0) throw std::invalid_argument("FlowField: exponents must be nonnegative");
            }
        }
    }
    if (!evaluator_) throw std::invalid_argument("FlowField: evaluator is required");
}

Eigen::VectorXd FlowField::operator()(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw std::invalid_argument("FlowField: state dimension mismatch");
    Eigen::VectorXd out(dim());
    evaluator_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
               std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

Eigen::VectorXd FlowField::evaluate_terms(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw std::invalid_argument("FlowField: state dimension mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (int j = 0; j < dim(); ++j) {
        for (const auto& term : components_[static_cast<std::size_t>(j)]) {
            double v = term.coefficient;
            for (int k = 0; k < dim(); ++k) v *= std::pow(x[k], term.exponents[static_cast<std::size_t>(k)]);
            out[j] += v;
        }
    }
    return out;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<Eigen::VectorXd> states)
    : times_(std::move(times)), states_(std::move(states)) {
    if (times_.size() != states_.size()) {
        throw std::invalid_argument("Trajectory: times and states differ in length");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (!(times_[k] > times_[k - 1])) {
            throw std::invalid_argument("Trajectory: times must be strictly increasing");
        }
    }
}

FlowField decay_flow() {
    return FlowField("decay", {{PolynomialTerm{-1.0, {2}}}},
                     [](std::span<const double> x, std::span<double> out) { out[0] = -x[0] * x[0]; });
}

FlowField vdp_flow(double mu) {
    std::vector<PolynomialTerm> fx{{1.0, {0, 1}}};
    std::vector<PolynomialTerm> fy{{-1.0, {1, 0}}, {mu, {0, 1}}, {-mu, {2, 1}}};
    return FlowField("vdp", {fx, fy}, [mu](std::span<const double> x, std::span<double> out) {
        out[0] = x[1];
        out[1] = -x[0] + mu * (1.0 - x[0] * x[0]) * x[1];
    });
}

double analytic_decay_solution(double x0, double t) {
    if (!(x0 > 0.0)) throw std::invalid_argument("analytic_decay_solution: x0 must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("analytic_decay_solution: t must be nonnegative");
    return x0 / (1.0 + x0 * t);
}

Trajectory reference_trajectory(const FlowField& flow, const Eigen::VectorXd& x0,
                                std::span<const double> times, double abs_tol, double rel_tol) {
    if (!(abs_tol > 0.0 && abs_tol < 1.0) || !(rel_tol > 0.0 && rel_tol < 1.0)) {
        throw std::invalid_argument("reference_trajectory: tolerances must lie in (0, 1)");
    }
    if (x0.size() != flow.dim()) throw std::invalid_argument("reference_trajectory: x0 dimension mismatch");
    if (times.empty()) return {};

    numerics::AdaptiveOptions opt;
    opt.abs_tol = abs_tol;
    opt.rel_tol = rel_tol;
    auto rhs = [&flow](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        flow.evaluate(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                      std::span<double>(dy.data(), static_cast<std::size_t>(dy.size())));
    };
    auto sol = numerics::solve_ivp(rhs, times.front(), x0, times, opt);
    switch (sol.status) {
        case numerics::IvpStatus::Success:
            break;
        case numerics::IvpStatus::Diverged:
            throw DivergenceError(sol.failure_time);
        case numerics::IvpStatus::StepSizeUnderflow:
        case numerics::IvpStatus::MaxStepsExceeded:
            throw StepSizeUnderflow(sol.failure_time, 0.0);
    }
    return Trajectory(std::move(sol.times), std::move(sol.states));
}

Eigen::VectorXd vdp_warmup_state(double mu, double warmup_time) {
    const std::vector<double> times{0.0, warmup_time};
    auto traj = reference_trajectory(vdp_flow(mu), Eigen::Vector2d(2.0, 0.0), times, 1e-10, 1e-10);
    return traj.states().back();
}

std::vector<double> uniform_times(double delta, long steps) {
    if (!(delta > 0.0)) throw std::invalid_argument("uniform_times: delta must be positive");
    if (steps < 0) throw std::invalid_argument("uniform_times: steps must be nonnegative");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (long k = 0; k <= steps; ++k) t[static_cast<std::size_t>(k)] = static_cast<double>(k) * delta;
    return t;
}

}  // namespace linrep
