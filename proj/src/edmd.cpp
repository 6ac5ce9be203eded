#include "linrep/edmd.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "linrep/csv.hpp"
#include "linrep/numerics.hpp"

namespace linrep {

namespace {

std::string column_name(char prefix, const MultiIndex& e) {
    std::string name(1, prefix);
    for (int v : e) name += "_" + std::to_string(v);
    return name;
}

MultiIndex parse_column(const std::string& name, char prefix) {
    if (name.size() < 3 || name[0] != prefix || name[1] != '_') {
        throw std::invalid_argument("snapshot csv: bad column name '" + name + "'");
    }
    MultiIndex e;
    for (const auto& part : csv::split(std::string_view(name).substr(2), '_')) e.push_back(std::stoi(part));
    return e;
}

}  // namespace

SnapshotMatrix build_snapshots(const Trajectory& trajectory, const MonomialBasis& dictionary, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("build_snapshots: delta must be positive");
    const auto& t = trajectory.times();
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double gap = t[k] - t[k - 1];
        if (std::abs(gap - delta) > 1e-9 * std::max(1.0, delta)) {
            throw std::invalid_argument("build_snapshots: trajectory is not sampled uniformly at delta (gap " +
                                        std::to_string(gap) + " at sample " + std::to_string(k) + ")");
        }
    }
    const Eigen::Index pairs = trajectory.size() < 2 ? 0 : static_cast<Eigen::Index>(trajectory.size()) - 1;
    SnapshotMatrix s{dictionary, Eigen::MatrixXd(pairs, dictionary.size()),
                     Eigen::MatrixXd(pairs, dictionary.size()), delta};
    if (pairs == 0) return s;
    Eigen::VectorXd prev = dictionary.evaluate(trajectory.state(0));
    for (Eigen::Index k = 0; k < pairs; ++k) {
        Eigen::VectorXd next = dictionary.evaluate(trajectory.state(static_cast<std::size_t>(k) + 1));
        s.x.row(k) = prev.transpose();
        s.y.row(k) = next.transpose();
        prev = std::move(next);
    }
    return s;
}

KoopmanMatrix fit_koopman(const SnapshotMatrix& snapshots, double ridge) {
    if (snapshots.x.rows() != snapshots.y.rows() || snapshots.x.cols() != snapshots.y.cols()) {
        throw std::invalid_argument("fit_koopman: X and Y shapes differ");
    }
    if (snapshots.x.cols() != snapshots.dictionary.size()) {
        throw std::invalid_argument("fit_koopman: column count does not match dictionary");
    }
    if (ridge < 0.0) throw std::invalid_argument("fit_koopman: ridge must be nonnegative");

    const Eigen::Index n = snapshots.x.cols();
    numerics::LeastSquaresResult ls;
    if (ridge > 0.0) {
        // Stacking sqrt(ridge) I under X is the orthogonal-factorization form
        // of Tikhonov regularization.
        Eigen::MatrixXd a(snapshots.x.rows() + n, n);
        Eigen::MatrixXd b(snapshots.y.rows() + n, n);
        a << snapshots.x, std::sqrt(ridge) * Eigen::MatrixXd::Identity(n, n);
        b << snapshots.y, Eigen::MatrixXd::Zero(n, n);
        ls = numerics::least_squares(a, b);
        ls.rank = numerics::least_squares(snapshots.x, snapshots.y).rank;
    } else {
        ls = numerics::least_squares(snapshots.x, snapshots.y);
    }
    return KoopmanMatrix{ls.solution.transpose(), snapshots.delta, snapshots.dictionary, ls.rank};
}

double fit_residual(const SnapshotMatrix& snapshots, const Eigen::MatrixXd& k) {
    return (snapshots.x * k.transpose() - snapshots.y).norm();
}

Trajectory predict_recursive(const KoopmanMatrix& koopman, const Eigen::VectorXd& x0, long steps) {
    if (steps < 0) throw std::invalid_argument("predict_recursive: steps must be nonnegative");
    std::vector<double> times;
    std::vector<Eigen::VectorXd> g;
    times.reserve(static_cast<std::size_t>(steps) + 1);
    g.reserve(static_cast<std::size_t>(steps) + 1);
    g.push_back(koopman.dictionary.evaluate(x0));
    times.push_back(0.0);
    for (long s = 1; s <= steps; ++s) {
        g.push_back(koopman.k * g.back());
        times.push_back(static_cast<double>(s) * koopman.delta);
    }
    return Trajectory(std::move(times), std::move(g));
}

void write_snapshots_csv(const SnapshotMatrix& s, std::ostream& out) {
    const auto& ord = s.dictionary.ordering();
    bool first = true;
    for (char prefix : {'X', 'Y'}) {
        for (const auto& e : ord) {
            if (!first) out << ',';
            out << column_name(prefix, e);
            first = false;
        }
    }
    out << '\n';
    for (Eigen::Index r = 0; r < s.pairs(); ++r) {
        for (Eigen::Index c = 0; c < s.x.cols(); ++c) out << (c ? "," : "") << csv::format(s.x(r, c));
        for (Eigen::Index c = 0; c < s.y.cols(); ++c) out << ',' << csv::format(s.y(r, c));
        out << '\n';
    }
}

void write_snapshots_csv(const SnapshotMatrix& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_snapshots_csv(s, out);
}

SnapshotMatrix read_snapshots_csv(std::istream& in, double delta) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("snapshot csv: missing header");
    const auto header = csv::split(line);
    if (header.size() % 2 != 0 || header.empty()) {
        throw std::invalid_argument("snapshot csv: header must have an even number of columns");
    }
    const std::size_t n = header.size() / 2;
    std::vector<MultiIndex> ex;
    for (std::size_t c = 0; c < n; ++c) ex.push_back(parse_column(header[c], 'X'));
    int max_degree = 0;
    for (const auto& e : ex) {
        int d = 0;
        for (int v : e) d += v;
        max_degree = std::max(max_degree, d);
    }
    MonomialBasis dictionary(static_cast<int>(ex.front().size()), max_degree);
    if (dictionary.ordering() != ex) {
        throw std::invalid_argument("snapshot csv: columns are not a full graded monomial dictionary");
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (parse_column(header[n + c], 'Y') != ex[c]) {
            throw std::invalid_argument("snapshot csv: Y columns do not mirror X columns");
        }
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split(line);
        if (fields.size() != header.size()) throw std::invalid_argument("snapshot csv: ragged row");
        std::vector<double> row;
        for (const auto& f : fields) row.push_back(csv::parse_double(f));
        rows.push_back(std::move(row));
    }
    const auto pairs = static_cast<Eigen::Index>(rows.size());
    SnapshotMatrix s{dictionary, Eigen::MatrixXd(pairs, static_cast<Eigen::Index>(n)),
                     Eigen::MatrixXd(pairs, static_cast<Eigen::Index>(n)), delta};
    for (Eigen::Index r = 0; r < pairs; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            s.x(r, static_cast<Eigen::Index>(c)) = rows[static_cast<std::size_t>(r)][c];
            s.y(r, static_cast<Eigen::Index>(c)) = rows[static_cast<std::size_t>(r)][n + c];
        }
    }
    return s;
}

SnapshotMatrix read_snapshots_csv(const std::filesystem::path& path, double delta) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_snapshots_csv(in, delta);
}

}  // namespace linrep
