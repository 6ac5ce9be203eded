#include "linrep/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "linrep/carleman.hpp"
#include "linrep/csv.hpp"
#include "linrep/edmd.hpp"
#include "linrep/errors.hpp"
#include "linrep/grid.hpp"
#include "linrep/kvn.hpp"
#include "linrep/liouville.hpp"
#include "linrep/models.hpp"

namespace linrep {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, MethodKind>& method_names() {
    static const std::map<std::string, MethodKind> names{
        {"carleman_truncation", MethodKind::CarlemanTruncation},
        {"edmd_projection", MethodKind::EdmdProjection},
        {"kvn", MethodKind::Kvn},
        {"cme_exponential", MethodKind::CmeExponential},
        {"cme_euler", MethodKind::CmeEuler},
        {"invariant_exact", MethodKind::InvariantExact},
        {"reference", MethodKind::Reference},
    };
    return names;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
    }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) fail(path, "is required");
    return obj.at(key);
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "must be finite");
    return d;
}

long get_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "must be an integer");
    return v.get<long>();
}

double positive(const json& v, const std::string& path) {
    const double d = get_number(v, path);
    if (!(d > 0.0)) fail(path, "must be positive");
    return d;
}

Eigen::VectorXd get_state(const json& v, const std::string& path) {
    if (v.is_number()) return Eigen::VectorXd::Constant(1, get_number(v, path));
    if (!v.is_array() || v.empty()) fail(path, "must be a number or a non-empty array of numbers");
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = get_number(v[i], path);
    return x;
}

}  // namespace

bool is_grid_method(MethodKind m) {
    return m == MethodKind::Kvn || m == MethodKind::CmeExponential || m == MethodKind::CmeEuler;
}

std::string to_string(MethodKind m) {
    for (const auto& [name, kind] : method_names()) {
        if (kind == m) return name;
    }
    return "unknown";
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, "",
                   {"name", "model", "method", "delta", "steps", "grid", "initial", "order", "edmd",
                    "reference_tol", "epsilons", "output_dir", "output_every", "heatmap_every"});
    ExperimentConfig c;
    c.source = doc;

    const json& name = require(doc, "name", "name");
    if (!name.is_string() || name.get<std::string>().empty()) fail("name", "must be a non-empty string");
    c.name = name.get<std::string>();

    // model
    const json& model = require(doc, "model", "model");
    if (!model.is_object()) fail("model", "must be an object");
    reject_unknown(model, "model", {"kind", "x0", "mu", "warmup", "warmup_time"});
    const json& kind = require(model, "kind", "model.kind");
    if (kind == "decay") {
        c.model = ModelKind::Decay;
        c.x0 = get_state(require(model, "x0", "model.x0"), "model.x0");
        if (c.x0.size() != 1) fail("model.x0", "decay model takes a single initial value");
        for (const char* k : {"mu", "warmup", "warmup_time"}) {
            if (model.contains(k)) fail(std::string("model.") + k, "only applies to the vdp model");
        }
    } else if (kind == "vdp") {
        c.model = ModelKind::Vdp;
        c.mu = model.contains("mu") ? get_number(model["mu"], "model.mu") : 0.5;
        if (model.contains("warmup")) {
            if (!model["warmup"].is_boolean()) fail("model.warmup", "must be true or false");
            c.warmup = model["warmup"].get<bool>();
        }
        if (model.contains("warmup_time")) c.warmup_time = positive(model["warmup_time"], "model.warmup_time");
        if (c.warmup == model.contains("x0")) fail("model", "vdp needs exactly one of x0 or warmup=true");
        if (!c.warmup) {
            c.x0 = get_state(model["x0"], "model.x0");
            if (c.x0.size() != 2) fail("model.x0", "vdp initial state has two entries");
        }
    } else {
        fail("model.kind", "must be \"decay\" or \"vdp\"");
    }
    const int dim = c.model == ModelKind::Decay ? 1 : 2;

    // method
    const json& method = require(doc, "method", "method");
    if (!method.is_string() || !method_names().count(method.get<std::string>())) {
        std::string list;
        for (const auto& [n, k] : method_names()) list += (list.empty() ? "" : ", ") + n;
        fail("method", "must be one of " + list);
    }
    c.method = method_names().at(method.get<std::string>());
    if (c.method == MethodKind::InvariantExact && c.model != ModelKind::Decay) {
        fail("method", "invariant_exact is only available for the decay model");
    }
    if (c.method == MethodKind::InvariantExact && !(c.x0[0] > 0.0)) fail("model.x0", "must be positive");

    c.delta = positive(require(doc, "delta", "delta"), "delta");
    c.steps = get_integer(require(doc, "steps", "steps"), "steps");
    if (c.steps < 0) fail("steps", "must be nonnegative");

    // grid
    if (is_grid_method(c.method)) {
        const json& grid = require(doc, "grid", "grid");
        if (!grid.is_object()) fail("grid", "must be an object");
        reject_unknown(grid, "grid", {"bounds", "points", "dense_threshold", "krylov_tol"});
        const json& bounds = require(grid, "bounds", "grid.bounds");
        const json& points = require(grid, "points", "grid.points");
        if (!bounds.is_array() || bounds.size() != static_cast<std::size_t>(dim)) {
            fail("grid.bounds", "must list one [low, high] pair per state dimension (" + std::to_string(dim) + ")");
        }
        if (!points.is_array() || points.size() != static_cast<std::size_t>(dim)) {
            fail("grid.points", "must list one point count per state dimension (" + std::to_string(dim) + ")");
        }
        for (std::size_t a = 0; a < bounds.size(); ++a) {
            const std::string path = "grid.bounds[" + std::to_string(a) + "]";
            if (!bounds[a].is_array() || bounds[a].size() != 2) fail(path, "must be [low, high]");
            const double lo = get_number(bounds[a][0], path);
            const double hi = get_number(bounds[a][1], path);
            if (!(lo < hi)) fail(path, "low must be below high");
            c.bounds.push_back({lo, hi});
            const long n = get_integer(points[a], "grid.points[" + std::to_string(a) + "]");
            if (n < 2) fail("grid.points[" + std::to_string(a) + "]", "must be at least 2");
            c.points.push_back(n);
        }
        if (grid.contains("dense_threshold")) {
            c.dense_threshold = get_integer(grid["dense_threshold"], "grid.dense_threshold");
            if (c.dense_threshold < 0) fail("grid.dense_threshold", "must be nonnegative");
        }
        if (grid.contains("krylov_tol")) c.krylov_tol = positive(grid["krylov_tol"], "grid.krylov_tol");

        if (doc.contains("initial")) {
            const json& init = doc["initial"];
            if (!init.is_object()) fail("initial", "must be an object");
            reject_unknown(init, "initial", {"kind", "points"});
            const json& ik = require(init, "kind", "initial.kind");
            if (ik == "delta") {
                c.initial.kind = InitialDistribution::Kind::Delta;
                if (init.contains("points")) fail("initial.points", "only applies to a gaussian initial");
            } else if (ik == "gaussian") {
                c.initial.kind = InitialDistribution::Kind::Gaussian;
                const long n = get_integer(require(init, "points", "initial.points"), "initial.points");
                if (n < 1) fail("initial.points", "must be at least 1");
                c.initial.points = static_cast<int>(n);
            } else {
                fail("initial.kind", "must be \"delta\" or \"gaussian\"");
            }
        }
    } else {
        for (const char* k : {"grid", "initial"}) {
            if (doc.contains(k)) fail(k, "only applies to grid methods (kvn, cme_exponential, cme_euler)");
        }
    }

    // observable methods
    if (c.method == MethodKind::CarlemanTruncation || c.method == MethodKind::EdmdProjection) {
        const long order = get_integer(require(doc, "order", "order"), "order");
        if (order < 1) fail("order", "must be at least 1");
        c.order = static_cast<int>(order);
    } else if (doc.contains("order")) {
        fail("order", "only applies to carleman_truncation and edmd_projection");
    }
    if (c.method == MethodKind::EdmdProjection) {
        const json& e = require(doc, "edmd", "edmd");
        if (!e.is_object()) fail("edmd", "must be an object");
        reject_unknown(e, "edmd", {"training_steps", "ridge"});
        c.training_steps = get_integer(require(e, "training_steps", "edmd.training_steps"), "edmd.training_steps");
        if (c.training_steps < 1) fail("edmd.training_steps", "must be at least 1");
        if (e.contains("ridge")) {
            c.ridge = get_number(e["ridge"], "edmd.ridge");
            if (c.ridge < 0.0) fail("edmd.ridge", "must be nonnegative");
        }
    } else if (doc.contains("edmd")) {
        fail("edmd", "only applies to edmd_projection");
    }

    if (doc.contains("reference_tol")) {
        c.reference_tol = get_number(doc["reference_tol"], "reference_tol");
        if (!(c.reference_tol > 0.0 && c.reference_tol < 1.0)) fail("reference_tol", "must lie in (0, 1)");
    }
    if (doc.contains("epsilons")) {
        const json& e = doc["epsilons"];
        if (!e.is_array()) fail("epsilons", "must be an array of positive numbers");
        for (std::size_t i = 0; i < e.size(); ++i) c.epsilons.push_back(positive(e[i], "epsilons[" + std::to_string(i) + "]"));
    }

    const json& out = require(doc, "output_dir", "output_dir");
    if (!out.is_string() || out.get<std::string>().empty()) fail("output_dir", "must be a non-empty string");
    c.output_dir = out.get<std::string>();
    if (doc.contains("output_every")) {
        c.output_every = get_integer(doc["output_every"], "output_every");
        if (c.output_every < 1) fail("output_every", "must be at least 1");
    }
    if (doc.contains("heatmap_every")) {
        if (!is_grid_method(c.method)) fail("heatmap_every", "only applies to grid methods");
        c.heatmap_every = get_integer(doc["heatmap_every"], "heatmap_every");
        if (c.heatmap_every < 1) fail("heatmap_every", "must be at least 1");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
    return parse_config(doc);
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
    const char* root = std::getenv("LINREP_OUTPUT_ROOT");
    if (root && *root && config.output_dir.is_relative()) return std::filesystem::path(root) / config.output_dir;
    return config.output_dir;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

// Everything a run produces before it is written out.
struct RunState {
    SummaryStatistics summary;
    std::vector<double> heat_times;
    std::vector<Eigen::VectorXd> heat_rows;
    std::vector<double> traj_times;
    std::vector<Eigen::VectorXd> traj_states;
    json invariants = json::object();
};

FlowField make_flow(const ExperimentConfig& c) {
    return c.model == ModelKind::Decay ? decay_flow() : vdp_flow(c.mu);
}

Eigen::VectorXd start_state(const ExperimentConfig& c) {
    return c.warmup ? vdp_warmup_state(c.mu, c.warmup_time) : c.x0;
}

// Reference states at k * delta: closed form for the decay model, the
// adaptive integrator otherwise.
std::vector<Eigen::VectorXd> reference_states(const ExperimentConfig& c, const Eigen::VectorXd& x_start) {
    const auto times = uniform_times(c.delta, c.steps);
    std::vector<Eigen::VectorXd> out;
    if (c.model == ModelKind::Decay && x_start[0] > 0.0) {
        for (double t : times) out.push_back(Eigen::VectorXd::Constant(1, analytic_decay_solution(x_start[0], t)));
        return out;
    }
    return reference_trajectory(make_flow(c), x_start, times, c.reference_tol, c.reference_tol).states();
}

bool sampled(long k, long every, long steps) { return k % every == 0 || k == steps; }

double time_of(const ExperimentConfig& c, long k) { return static_cast<double>(k) * c.delta; }

void run_kvn(const ExperimentConfig& c, const Grid& grid, const Eigen::VectorXd& x_start,
             const std::vector<Eigen::VectorXd>& ref, RunState& st) {
    const HermitianOperator h = assemble_kvn_hamiltonian(grid, make_flow(c));
    PropagatorOptions opt;
    opt.dense_threshold = c.dense_threshold;
    opt.krylov_tol = c.krylov_tol;
    const HermitianOperator checked = grid.size() <= c.dense_threshold ? h.densified() : h;
    st.invariants["hermiticity_residual"] = hermiticity_residual(checked);
    st.invariants["hermiticity_check"] = checked.is_dense() ? "dense" : "random_probes";

    Wavefunction psi = c.initial.kind == InitialDistribution::Kind::Delta
                           ? delta_initial(grid, x_start)
                           : gaussian_initial(grid, x_start, c.initial.points);
    KvnPropagator prop(checked, c.delta, opt);
    st.invariants["dense_propagator"] = prop.uses_dense();
    auto record = [&](long k) {
        st.invariants["norm_drift"] = prop.max_norm_drift();
        st.invariants["renormalizations"] = prop.renormalizations();
        if (sampled(k, c.output_every, c.steps)) st.summary.add(time_of(c, k), born_density(psi), ref[static_cast<std::size_t>(k)]);
        if (sampled(k, c.heatmap_every, c.steps)) {
            st.heat_times.push_back(time_of(c, k));
            st.heat_rows.push_back(psi.amplitudes().cwiseAbs2());
        }
    };
    record(0);
    for (long k = 1; k <= c.steps; ++k) {
        psi = prop.step(psi);
        record(k);
    }
}

void run_cme(const ExperimentConfig& c, const Grid& grid, const Eigen::VectorXd& x_start,
             const std::vector<Eigen::VectorXd>& ref, RunState& st) {
    const SparseGenerator gen = assemble_cme(grid, make_flow(c));
    st.invariants["column_sum_residual"] = gen.column_sum_residual();
    st.invariants["min_offdiagonal"] = gen.min_offdiagonal();
    st.invariants["max_diagonal"] = gen.max_diagonal();
    st.invariants["max_exit_rate"] = gen.max_exit_rate();

    ProbabilityVector p = c.initial.kind == InitialDistribution::Kind::Delta
                              ? born_density(delta_initial(grid, x_start))
                              : born_density(gaussian_initial(grid, x_start, c.initial.points));
    CmeOptions opt;
    opt.dense_threshold = c.dense_threshold;
    opt.krylov_tol = c.krylov_tol;
    const auto method = c.method == MethodKind::CmeEuler ? CmeMethod::ForwardEuler : CmeMethod::Exponential;
    if (method == CmeMethod::ForwardEuler) st.invariants["courant"] = c.delta * gen.max_exit_rate();
    CmePropagator prop(gen, c.delta, method, opt);
    if (method == CmeMethod::Exponential) st.invariants["dense_propagator"] = prop.uses_dense();
    double sum_drift = 0.0;
    double min_p = 0.0;
    auto record = [&](long k) {
        sum_drift = std::max(sum_drift, std::abs(p.sum() - 1.0));
        min_p = std::min(min_p, p.min());
        st.invariants["probability_sum_drift"] = sum_drift;
        st.invariants["min_probability"] = min_p;
        if (sampled(k, c.output_every, c.steps)) st.summary.add(time_of(c, k), p, ref[static_cast<std::size_t>(k)]);
        if (sampled(k, c.heatmap_every, c.steps)) {
            st.heat_times.push_back(time_of(c, k));
            st.heat_rows.push_back(p.values());
        }
    };
    record(0);
    for (long k = 1; k <= c.steps; ++k) {
        p = prop.step(p);
        record(k);
    }
}

// Observable methods produce one state per step; `states` may stop early
// when the method failed.
void record_states(const ExperimentConfig& c, const std::vector<Eigen::VectorXd>& states,
                   const std::vector<Eigen::VectorXd>& ref, RunState& st) {
    for (std::size_t k = 0; k < states.size(); ++k) {
        const long step = static_cast<long>(k);
        if (!sampled(step, c.output_every, c.steps)) continue;
        st.summary.add_point(time_of(c, step), states[k], ref[k]);
        st.traj_times.push_back(time_of(c, step));
        st.traj_states.push_back(states[k]);
    }
}

void run_observable(const ExperimentConfig& c, const Eigen::VectorXd& x_start,
                    const std::vector<Eigen::VectorXd>& ref, RunState& st) {
    const auto times = uniform_times(c.delta, c.steps);
    const int dim = static_cast<int>(x_start.size());
    switch (c.method) {
    case MethodKind::Reference:
        record_states(c, reference_trajectory(make_flow(c), x_start, times, c.reference_tol, c.reference_tol).states(),
                      ref, st);
        return;
    case MethodKind::InvariantExact: {
        std::vector<Eigen::VectorXd> states;
        for (double t : times) states.push_back(Eigen::VectorXd::Constant(1, solve_via_invariant(x_start[0], t)));
        record_states(c, states, ref, st);
        return;
    }
    case MethodKind::CarlemanTruncation: {
        const CarlemanSystem sys = c.model == ModelKind::Decay ? lift_decay(c.order) : lift_vdp(c.order, c.mu);
        st.invariants["basis_size"] = sys.basis.size();
        st.invariants["closure"] = sys.closure;
        const LinearPropagation lp = propagate_linear(sys, x_start, times);
        record_states(c, lp.states(sys.basis).states(), ref, st);
        if (lp.diverged()) throw DivergenceError(*lp.divergence_time);
        return;
    }
    case MethodKind::EdmdProjection: {
        const MonomialBasis dict(dim, c.order);
        const Trajectory training = reference_trajectory(make_flow(c), x_start, uniform_times(c.delta, c.training_steps),
                                                         c.reference_tol, c.reference_tol);
        const SnapshotMatrix snaps = build_snapshots(training, dict, c.delta);
        const KoopmanMatrix k = fit_koopman(snaps, c.ridge);
        st.invariants["snapshot_pairs"] = snaps.pairs();
        st.invariants["rank"] = k.rank;
        st.invariants["rank_deficient"] = k.rank_deficient();
        st.invariants["fit_residual"] = fit_residual(snaps, k.k);
        json rows = json::array();
        for (Eigen::Index r = 0; r < k.k.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index col = 0; col < k.k.cols(); ++col) row.push_back(k.k(r, col));
            rows.push_back(row);
        }
        st.invariants["koopman_matrix"] = rows;
        const Trajectory g = predict_recursive(k, x_start, c.steps);
        std::vector<Eigen::VectorXd> states;
        for (const auto& gk : g.states()) {
            Eigen::VectorXd x = dict.state_from_observables(gk);
            if (!x.allFinite()) break;
            states.push_back(std::move(x));
        }
        record_states(c, states, ref, st);
        if (states.size() < g.size()) throw DivergenceError(time_of(c, static_cast<long>(states.size())));
        return;
    }
    default:
        throw std::logic_error("run_observable: not an observable method");
    }
}

void write_trajectory_csv(const RunState& st, std::size_t dim, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << 't';
    for (std::size_t a = 0; a < dim; ++a) out << ',' << (a == 0 ? 'x' : 'y');
    out << '\n';
    for (std::size_t k = 0; k < st.traj_times.size(); ++k) {
        out << csv::format(st.traj_times[k]);
        for (Eigen::Index a = 0; a < st.traj_states[k].size(); ++a) out << ',' << csv::format(st.traj_states[k][a]);
        out << '\n';
    }
}

void write_heatmap_csv(const RunState& st, const Grid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "shape";
    for (auto n : grid.shape()) out << ',' << n;
    out << '\n';
    for (std::size_t k = 0; k < st.heat_times.size(); ++k) {
        out << csv::format(st.heat_times[k]);
        for (Eigen::Index i = 0; i < st.heat_rows[k].size(); ++i) out << ',' << csv::format(st.heat_rows[k][i]);
        out << '\n';
    }
}

json sanitize(const json& v) {
    // JSON has no inf or nan; store them as strings.
    if (v.is_number_float() && !std::isfinite(v.get<double>())) {
        std::ostringstream s;
        s << v.get<double>();
        return s.str();
    }
    if (v.is_structured()) {
        json out = v;
        for (auto it = out.begin(); it != out.end(); ++it) *it = sanitize(*it);
        return out;
    }
    return v;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, resolve_output_dir(config));
}

RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& directory) {
    const auto started = std::chrono::steady_clock::now();
    RunResult result;
    result.directory = directory;
    RunState st;
    st.summary.epsilons = config.epsilons;

    std::optional<Grid> grid;
    const Eigen::VectorXd x_start = start_state(config);
    st.invariants["initial_state"] = std::vector<double>(x_start.data(), x_start.data() + x_start.size());
    try {
        const auto ref = reference_states(config, x_start);
        if (is_grid_method(config.method)) {
            grid = make_grid(config.bounds, config.points);
            if (!grid->contains(x_start)) {
                throw ConfigError("config field 'grid.bounds': initial state lies outside the grid");
            }
            if (config.method == MethodKind::Kvn) {
                run_kvn(config, *grid, x_start, ref, st);
            } else {
                run_cme(config, *grid, x_start, ref, st);
            }
        } else {
            run_observable(config, x_start, ref, st);
        }
    } catch (const NumericalError& e) {
        result.ok = false;
        result.error = e.what();
    }

    std::filesystem::create_directories(directory);
    write_summary_csv(st.summary, directory / "summary.csv");
    if (grid) {
        write_heatmap_csv(st, *grid, directory / "heatmap.csv");
    } else {
        write_trajectory_csv(st, static_cast<std::size_t>(x_start.size()), directory / "trajectory.csv");
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json meta;
    meta["config"] = config.source;
    meta["status"] = result.ok ? "ok" : "failed";
    if (!result.ok) meta["error"] = result.error;
    meta["method"] = to_string(config.method);
    meta["samples"] = st.summary.size();
    meta["wall_time_s"] = wall;
    meta["invariants"] = sanitize(st.invariants);
    std::ofstream out(directory / "meta.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write meta.json in " + directory.string());
    out << std::setw(2) << meta << '\n';

    result.summary = std::move(st.summary);
    result.invariants = meta["invariants"];
    return result;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

std::vector<RunComparison> compare_runs(const std::vector<std::filesystem::path>& runs,
                                        const std::filesystem::path& reference, double threshold) {
    const SummaryStatistics ref = read_summary_csv(reference / "summary.csv");
    const Trajectory truth = ref.mean_trajectory();
    std::vector<RunComparison> out;
    for (const auto& dir : runs) {
        const SummaryStatistics s = read_summary_csv(dir / "summary.csv");
        if (s.dim != ref.dim) throw std::invalid_argument(dir.string() + ": state dimension differs from the reference");
        try {
            out.push_back({dir.filename().string(), trajectory_error(s.mode_trajectory(), truth, threshold),
                           trajectory_error(s.mean_trajectory(), truth, threshold)});
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(dir.string() + ": incompatible sampling with the reference: " + e.what());
        }
    }
    return out;
}

void write_comparison_csv(const std::vector<RunComparison>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "run,mode_rmse,mode_horizon,mean_rmse,mean_horizon\n";
    for (const auto& r : rows) {
        out << r.run << ',' << csv::format(r.mode.rmse) << ',' << csv::format(r.mode.horizon) << ','
            << csv::format(r.mean.rmse) << ',' << csv::format(r.mean.horizon) << '\n';
    }
}

std::string format_comparison_table(const std::vector<RunComparison>& rows) {
    std::size_t width = 3;
    for (const auto& r : rows) width = std::max(width, r.run.size());
    std::ostringstream s;
    s << std::left << std::setw(static_cast<int>(width)) << "run" << std::right << std::setw(14) << "mode rmse"
      << std::setw(14) << "mode horizon" << std::setw(14) << "mean rmse" << std::setw(14) << "mean horizon" << '\n';
    for (const auto& r : rows) {
        s << std::left << std::setw(static_cast<int>(width)) << r.run << std::right << std::setprecision(6)
          << std::setw(14) << r.mode.rmse << std::setw(14) << r.mode.horizon << std::setw(14) << r.mean.rmse
          << std::setw(14) << r.mean.horizon << '\n';
    }
    return s.str();
}

}  // namespace linrep
