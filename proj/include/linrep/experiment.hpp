#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "linrep/diagnostics.hpp"

namespace linrep {

enum class ModelKind { Decay, Vdp };

enum class MethodKind {
    CarlemanTruncation,
    EdmdProjection,
    Kvn,
    CmeExponential,
    CmeEuler,
    InvariantExact,
    Reference,
};

bool is_grid_method(MethodKind m);
std::string to_string(MethodKind m);

struct InitialDistribution {
    enum class Kind { Delta, Gaussian } kind = Kind::Delta;
    int points = 1;  ///< support per axis for the Gaussian
};

/// One experiment, parsed from a single JSON document.
struct ExperimentConfig {
    std::string name;
    ModelKind model = ModelKind::Decay;
    MethodKind method = MethodKind::Reference;

    // Model parameters. Decay uses x0 (one entry); Van der Pol uses mu and
    // either x0 (two entries) or the warmed-up limit-cycle point.
    Eigen::VectorXd x0;
    double mu = 0.5;
    bool warmup = false;
    double warmup_time = 100.0;

    double delta = 0.01;
    long steps = 0;

    // Grid methods.
    std::vector<std::array<double, 2>> bounds;
    std::vector<Eigen::Index> points;
    InitialDistribution initial;
    Eigen::Index dense_threshold = 2048;
    double krylov_tol = 1e-10;

    // Observable methods.
    int order = 0;           ///< Carleman truncation order / EDMD dictionary degree
    long training_steps = 0; ///< EDMD snapshot pairs, sampled at delta from x0
    double ridge = 0.0;

    double reference_tol = 1e-10;
    std::vector<double> epsilons;
    long output_every = 1;
    long heatmap_every = 1;
    std::filesystem::path output_dir;

    nlohmann::json source;  ///< the document as read, echoed into meta.json
};

/// Validates and fills defaults; throws ConfigError naming the bad field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Directory the run writes to: output_dir, placed under the directory in
/// LINREP_OUTPUT_ROOT when that variable is set and output_dir is relative.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

struct RunResult {
    bool ok = true;
    std::string error;  ///< failure message when !ok
    std::filesystem::path directory;
    SummaryStatistics summary;
    nlohmann::json invariants;
};

/// Runs the experiment and writes summary.csv, meta.json and either
/// heatmap.csv (grid methods) or trajectory.csv (observable methods).
/// Numerical failures are caught, recorded in meta.json and reported with
/// ok = false; everything produced before the failure is still written.
RunResult run_experiment(const ExperimentConfig& config);

/// Same, writing to an explicit directory.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& directory);

struct RunComparison {
    std::string run;
    TrajectoryError mode;
    TrajectoryError mean;
};

/// Error of each run's mode and mean against the reference run's mean,
/// read from their summary.csv files. Throws std::invalid_argument when the
/// time samples differ.
std::vector<RunComparison> compare_runs(const std::vector<std::filesystem::path>& runs,
                                        const std::filesystem::path& reference, double threshold);

void write_comparison_csv(const std::vector<RunComparison>& rows, const std::filesystem::path& path);
std::string format_comparison_table(const std::vector<RunComparison>& rows);

}  // namespace linrep
