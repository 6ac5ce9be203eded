#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace linrep {

/// coefficient * prod_k x_k^exponents[k]
struct PolynomialTerm {
    double coefficient = 0.0;
    std::vector<int> exponents;
};

/// Polynomial vector field F: R^N -> R^N. Each component is stored as an
/// explicit term list (consumed by the Carleman lifting) alongside a closed
/// form evaluator used on hot paths; the two must agree.
class FlowField {
public:
    using Evaluator = std::function<void(std::span<const double> x, std::span<double> out)>;

    FlowField(std::string name, std::vector<std::vector<PolynomialTerm>> components, Evaluator evaluator);

    const std::string& name() const noexcept { return name_; }
    int dim() const noexcept { return static_cast<int>(components_.size()); }
    const std::vector<PolynomialTerm>& terms(int component) const { return components_.at(component); }

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
    void evaluate(std::span<const double> x, std::span<double> out) const { evaluator_(x, out); }

    /// Evaluates the term expansion directly (slow; used to cross-check).
    Eigen::VectorXd evaluate_terms(const Eigen::VectorXd& x) const;

private:
    std::string name_;
    std::vector<std::vector<PolynomialTerm>> components_;
    Evaluator evaluator_;
};

/// Samples of x(t; x0) at strictly increasing times.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> times, std::vector<Eigen::VectorXd> states);

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<Eigen::VectorXd>& states() const noexcept { return states_; }
    double time(std::size_t k) const { return times_.at(k); }
    const Eigen::VectorXd& state(std::size_t k) const { return states_.at(k); }

private:
    std::vector<double> times_;
    std::vector<Eigen::VectorXd> states_;
};

/// dx/dt = -x^2
FlowField decay_flow();

/// Van der Pol: dx/dt = y, dy/dt = -x + mu (1 - x^2) y
FlowField vdp_flow(double mu);

/// x0 / (1 + x0 t); requires x0 > 0 and t >= 0.
double analytic_decay_solution(double x0, double t);

/// Adaptive Dormand-Prince solution sampled at `times` (which must be
/// increasing; the integration starts at times.front()). Throws
/// StepSizeUnderflow or DivergenceError on failure.
Trajectory reference_trajectory(const FlowField& flow, const Eigen::VectorXd& x0,
                                std::span<const double> times, double abs_tol = 1e-10,
                                double rel_tol = 1e-10);

/// Point near the Van der Pol limit cycle: start at (2, 0) and integrate to
/// t = warmup_time with tolerance 1e-10.
Eigen::VectorXd vdp_warmup_state(double mu, double warmup_time = 100.0);

/// times[k] = k * delta for k = 0 .. steps
std::vector<double> uniform_times(double delta, long steps);

}  // namespace linrep
