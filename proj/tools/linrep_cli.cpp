// Command-line runner: `run <config.json>` and
// `compare <dirs...> --reference <dir> --threshold <v>`.
//
// Exit status: 0 success, 2 configuration or usage error, 3 numerical
// failure (details in the run's meta.json).

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linrep/errors.hpp"
#include "linrep/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

int run_command(const std::filesystem::path& config_path, const std::string& out_override) {
    const linrep::ExperimentConfig config = linrep::load_config(config_path);
    const auto dir = out_override.empty() ? linrep::resolve_output_dir(config) : std::filesystem::path(out_override);
    const linrep::RunResult result = linrep::run_experiment(config, dir);
    if (!result.ok) {
        std::cerr << "run '" << config.name << "' failed: " << result.error << " (see " << (dir / "meta.json").string()
                  << ")\n";
        return kNumericalFailure;
    }
    std::cout << "wrote " << dir.string() << " (" << result.summary.size() << " samples)\n";
    return 0;
}

int compare_command(const std::vector<std::string>& runs, const std::string& reference, double threshold,
                    const std::string& out) {
    std::vector<std::filesystem::path> dirs(runs.begin(), runs.end());
    const auto rows = linrep::compare_runs(dirs, reference, threshold);
    std::cout << linrep::format_comparison_table(rows);
    if (!out.empty()) linrep::write_comparison_csv(rows, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear representations of nonlinear flows: experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string run_out;
    auto* run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("config", config_path, "Experiment JSON file")->required();
    run->add_option("--out", run_out, "Write here instead of the config's output_dir");

    std::vector<std::string> runs;
    std::string reference;
    double threshold = 0.05;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "Compare run directories against a reference run");
    compare->add_option("runs", runs, "Run directories")->required();
    compare->add_option("--reference", reference, "Reference run directory")->required();
    compare->add_option("--threshold", threshold, "Error threshold that ends the prediction horizon");
    compare->add_option("--out", compare_out, "Also write the comparison as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) return run_command(config_path, run_out);
        return compare_command(runs, reference, threshold, compare_out);
    } catch (const linrep::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const linrep::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
