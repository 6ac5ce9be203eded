#include "linrep/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "linrep/csv.hpp"

namespace linrep {

namespace {

constexpr const char* kAxisNames[] = {"x", "y"};

void require_nonempty(const ProbabilityVector& p) {
    if (p.size() == 0) throw std::invalid_argument("diagnostics: empty probability vector");
}

// Shortest round-trip text, used for column labels.
std::string label(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

Eigen::VectorXd mode(const ProbabilityVector& p) {
    require_nonempty(p);
    Eigen::Index best = 0;
    const auto& v = p.values();
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return p.grid().point(best);
}

Eigen::VectorXd mean(const ProbabilityVector& p) {
    require_nonempty(p);
    const Grid& g = p.grid();
    Eigen::VectorXd m(static_cast<Eigen::Index>(g.dim()));
    for (std::size_t a = 0; a < g.dim(); ++a) m[static_cast<Eigen::Index>(a)] = p.values().dot(g.coordinates(a));
    return m;
}

Eigen::VectorXd std_dev(const ProbabilityVector& p) {
    const Eigen::VectorXd m = mean(p);
    const Grid& g = p.grid();
    Eigen::VectorXd s(m.size());
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const auto ai = static_cast<Eigen::Index>(a);
        const Eigen::VectorXd d = (g.coordinates(a).array() - m[ai]).matrix();
        s[ai] = std::sqrt(std::max(0.0, p.values().dot(d.cwiseProduct(d))));
    }
    return s;
}

double p_epsilon(const ProbabilityVector& p, const Eigen::VectorXd& x_ref, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("p_epsilon: eps must be positive");
    const Grid& g = p.grid();
    if (x_ref.size() != static_cast<Eigen::Index>(g.dim())) {
        throw std::invalid_argument("p_epsilon: reference dimension mismatch");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        bool inside = true;
        for (std::size_t a = 0; a < g.dim() && inside; ++a) {
            inside = std::abs(g.coordinate(i, a) - x_ref[static_cast<Eigen::Index>(a)]) < eps;
        }
        if (inside) total += p[i];
    }
    return total;
}

TrajectoryError trajectory_error(const Trajectory& predicted, const Trajectory& reference, double threshold) {
    if (predicted.size() != reference.size()) {
        throw std::invalid_argument("trajectory_error: trajectories have different sample counts (" +
                                    std::to_string(predicted.size()) + " vs " +
                                    std::to_string(reference.size()) + ")");
    }
    if (predicted.empty()) throw std::invalid_argument("trajectory_error: empty trajectories");
    TrajectoryError out{0.0, std::numeric_limits<double>::infinity()};
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        const double tp = predicted.time(k);
        const double tr = reference.time(k);
        if (std::abs(tp - tr) > 1e-9 * std::max(1.0, std::abs(tr))) {
            throw std::invalid_argument("trajectory_error: sample times differ at index " + std::to_string(k));
        }
        if (predicted.state(k).size() != reference.state(k).size()) {
            throw std::invalid_argument("trajectory_error: state dimensions differ");
        }
        const double e = (predicted.state(k) - reference.state(k)).norm();
        sum_sq += e * e;
        if (std::isinf(out.horizon) && !(e <= threshold)) out.horizon = tr;
    }
    out.rmse = std::sqrt(sum_sq / static_cast<double>(predicted.size()));
    return out;
}

// ---------------------------------------------------------------------------
// SummaryStatistics
// ---------------------------------------------------------------------------

void SummaryStatistics::add(double t, const ProbabilityVector& p, const Eigen::VectorXd& x_ref) {
    if (dim == 0) dim = p.grid().dim();
    if (p.grid().dim() != dim) throw std::invalid_argument("SummaryStatistics: dimension changed");
    times.push_back(t);
    modes.push_back(mode(p));
    means.push_back(mean(p));
    stds.push_back(std_dev(p));
    std::vector<double> row;
    row.reserve(epsilons.size());
    for (double e : epsilons) row.push_back(p_epsilon(p, x_ref, e));
    p_eps.push_back(std::move(row));
}

void SummaryStatistics::add_point(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& x_ref) {
    if (dim == 0) dim = static_cast<std::size_t>(x.size());
    if (static_cast<std::size_t>(x.size()) != dim || x_ref.size() != x.size()) {
        throw std::invalid_argument("SummaryStatistics: dimension mismatch");
    }
    times.push_back(t);
    modes.push_back(x);
    means.push_back(x);
    stds.push_back(Eigen::VectorXd::Zero(x.size()));
    std::vector<double> row;
    for (double e : epsilons) row.push_back((x - x_ref).cwiseAbs().maxCoeff() < e ? 1.0 : 0.0);
    p_eps.push_back(std::move(row));
}

Trajectory SummaryStatistics::mode_trajectory() const { return Trajectory(times, modes); }

Trajectory SummaryStatistics::mean_trajectory() const { return Trajectory(times, means); }

void write_summary_csv(const SummaryStatistics& s, std::ostream& out) {
    if (s.dim > 2) throw std::invalid_argument("write_summary_csv: at most two axes supported");
    out << 't';
    for (const char* kind : {"mode", "mean", "std"}) {
        for (std::size_t a = 0; a < s.dim; ++a) out << ',' << kind << '_' << kAxisNames[a];
    }
    for (double e : s.epsilons) out << ",p_eps@" << label(e);
    out << '\n';
    for (std::size_t k = 0; k < s.size(); ++k) {
        out << csv::format(s.times[k]);
        for (const auto* series : {&s.modes, &s.means, &s.stds}) {
            for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(s.dim); ++a) out << ',' << csv::format((*series)[k][a]);
        }
        for (double v : s.p_eps[k]) out << ',' << csv::format(v);
        out << '\n';
    }
}

void write_summary_csv(const SummaryStatistics& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_summary_csv(s, out);
}

SummaryStatistics read_summary_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": missing header");
    const auto header = csv::split(line);
    SummaryStatistics s;
    std::size_t mode_cols = 0;
    for (const auto& h : header) {
        if (h.rfind("mode_", 0) == 0) ++mode_cols;
        if (h.rfind("p_eps@", 0) == 0) s.epsilons.push_back(csv::parse_double(std::string_view(h).substr(6)));
    }
    s.dim = mode_cols;
    if (s.dim < 1 || s.dim > 2 || header.size() != 1 + 3 * s.dim + s.epsilons.size() || header[0] != "t") {
        throw std::invalid_argument(path.string() + ": not a summary file");
    }
    const auto d = static_cast<Eigen::Index>(s.dim);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = csv::split(line);
        if (f.size() != header.size()) throw std::invalid_argument(path.string() + ": ragged row");
        std::size_t c = 0;
        s.times.push_back(csv::parse_double(f[c++]));
        for (auto* series : {&s.modes, &s.means, &s.stds}) {
            Eigen::VectorXd v(d);
            for (Eigen::Index a = 0; a < d; ++a) v[a] = csv::parse_double(f[c++]);
            series->push_back(std::move(v));
        }
        std::vector<double> row;
        while (c < f.size()) row.push_back(csv::parse_double(f[c++]));
        s.p_eps.push_back(std::move(row));
    }
    return s;
}

}  // namespace linrep
