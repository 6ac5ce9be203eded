#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <json.hpp>

#include "linrep/errors.hpp"
#include "linrep/experiment.hpp"

using namespace linrep;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json decay_cme_doc() {
    return json::parse(R"({
        "name": "t_cme", "model": {"kind": "decay", "x0": 1.0},
        "method": "cme_exponential",
        "grid": {"bounds": [[0, 2]], "points": [128]},
        "initial": {"kind": "delta"},
        "delta": 0.05, "steps": 40, "epsilons": [0.05, 0.1],
        "output_dir": "runs/t_cme"
    })");
}

json decay_kvn_doc() {
    json d = decay_cme_doc();
    d["name"] = "t_kvn";
    d["method"] = "kvn";
    d["output_dir"] = "runs/t_kvn";
    return d;
}

json decay_reference_doc() {
    json d = json::parse(R"({
        "name": "t_ref", "model": {"kind": "decay", "x0": 1.0},
        "method": "reference", "delta": 0.05, "steps": 40,
        "epsilons": [0.05, 0.1], "output_dir": "runs/t_ref"
    })");
    return d;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("linrep_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config_error_message(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LINREP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_json(const fs::path& p, const json& doc) { std::ofstream(p) << doc.dump(2); }

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

TEST(Config, ParsesValidDocument) {
    const ExperimentConfig c = parse_config(decay_cme_doc());
    EXPECT_EQ(c.method, MethodKind::CmeExponential);
    EXPECT_EQ(c.points, std::vector<Eigen::Index>{128});
    EXPECT_EQ(c.steps, 40);
    EXPECT_EQ(c.epsilons, (std::vector<double>{0.05, 0.1}));
}

TEST(Config, ErrorsNameTheField) {
    json d = decay_cme_doc();
    d["delta"] = -0.1;
    EXPECT_NE(config_error_message(d).find("'delta'"), std::string::npos);

    d = decay_cme_doc();
    d["method"] = "spectral";
    EXPECT_NE(config_error_message(d).find("'method'"), std::string::npos);

    d = decay_cme_doc();
    d["grid"]["points"] = json::array({0});
    EXPECT_NE(config_error_message(d).find("'grid.points[0]'"), std::string::npos);

    d = decay_cme_doc();
    d["grid"]["bounds"] = json::array({json::array({2.0, 0.0})});
    EXPECT_NE(config_error_message(d).find("'grid.bounds[0]'"), std::string::npos);

    d = decay_cme_doc();
    d["stpes"] = 10;
    EXPECT_NE(config_error_message(d).find("stpes"), std::string::npos);

    d = decay_cme_doc();
    d.erase("steps");
    EXPECT_NE(config_error_message(d).find("'steps'"), std::string::npos);
}

TEST(Config, OutputRootEnvironment) {
    const ExperimentConfig c = parse_config(decay_cme_doc());
    ::setenv("LINREP_OUTPUT_ROOT", "/tmp/some_root", 1);
    EXPECT_EQ(resolve_output_dir(c), fs::path("/tmp/some_root/runs/t_cme"));
    ::unsetenv("LINREP_OUTPUT_ROOT");
    EXPECT_EQ(resolve_output_dir(c), fs::path("runs/t_cme"));
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

TEST(Run, WritesArtifactsAndIsDeterministic) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (const json& doc : {decay_cme_doc(), decay_kvn_doc(), decay_reference_doc()}) {
        const ExperimentConfig c = parse_config(doc);
        ASSERT_TRUE(run_experiment(c, a / c.name).ok);
        ASSERT_TRUE(run_experiment(c, b / c.name).ok);
        EXPECT_EQ(slurp(a / c.name / "summary.csv"), slurp(b / c.name / "summary.csv")) << c.name;
        const char* extra = is_grid_method(c.method) ? "heatmap.csv" : "trajectory.csv";
        EXPECT_EQ(slurp(a / c.name / extra), slurp(b / c.name / extra)) << c.name;
        const json meta = json::parse(slurp(a / c.name / "meta.json"));
        EXPECT_EQ(meta.at("status"), "ok");
        EXPECT_EQ(meta.at("samples"), 41);
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Run, CmeInvariantsRecorded) {
    const fs::path dir = scratch("cme_inv");
    const RunResult r = run_experiment(parse_config(decay_cme_doc()), dir);
    ASSERT_TRUE(r.ok);
    EXPECT_LE(r.invariants.at("column_sum_residual").get<double>(), 1e-12);
    EXPECT_EQ(r.summary.size(), 41u);
    fs::remove_all(dir);
}

TEST(Run, NumericalFailureIsReported) {
    json d = decay_cme_doc();
    d["method"] = "cme_euler";  // delta 0.05 is far beyond the CFL limit
    const fs::path dir = scratch("cfl");
    const RunResult r = run_experiment(parse_config(d), dir);
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.error.empty());
    EXPECT_EQ(json::parse(slurp(dir / "meta.json")).at("status"), "failed");
    fs::remove_all(dir);
}

TEST(Compare, IdenticalRunsHaveZeroError) {
    const fs::path dir = scratch("cmp_same");
    const ExperimentConfig ref = parse_config(decay_reference_doc());
    run_experiment(ref, dir / "ref");
    run_experiment(ref, dir / "ref2");
    const auto rows = compare_runs({dir / "ref2"}, dir / "ref", 0.05);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].mean.rmse, 0.0);
    EXPECT_EQ(rows[0].mean.horizon, std::numeric_limits<double>::infinity());
    fs::remove_all(dir);
}

TEST(Compare, CmeMeanTracksLongerThanKvnOnDecay) {
    json kvn = decay_kvn_doc(), cme = decay_cme_doc(), ref = decay_reference_doc();
    for (json* d : {&kvn, &cme, &ref}) {
        (*d)["steps"] = 200;  // t = 10
    }
    kvn["grid"]["points"] = cme["grid"]["points"] = json::array({512});
    const fs::path dir = scratch("cmp_horizon");
    for (const json& d : {kvn, cme, ref}) run_experiment(parse_config(d), dir / d["name"].get<std::string>());
    const auto rows = compare_runs({dir / "t_kvn", dir / "t_cme"}, dir / "t_ref", 0.05);
    EXPECT_GT(rows[1].mean.horizon, rows[0].mean.horizon);
    EXPECT_LT(rows[1].mean.rmse, rows[0].mean.rmse);
    fs::remove_all(dir);
}

TEST(Compare, MismatchedTimesRejected) {
    const fs::path dir = scratch("cmp_mismatch");
    json other = decay_reference_doc();
    other["delta"] = 0.1;
    run_experiment(parse_config(decay_reference_doc()), dir / "a");
    run_experiment(parse_config(other), dir / "b");
    EXPECT_THROW(compare_runs({dir / "b"}, dir / "a", 0.05), std::invalid_argument);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("cli");
    write_json(dir / "good.json", decay_reference_doc());
    json bad = decay_reference_doc();
    bad["delta"] = "fast";
    write_json(dir / "bad.json", bad);
    json cfl = decay_cme_doc();
    cfl["method"] = "cme_euler";
    write_json(dir / "cfl.json", cfl);
    std::ofstream(dir / "broken.json") << "{ not json";

    const std::string out = " --out " + (dir / "out").string();
    EXPECT_EQ(run_cli("run " + (dir / "good.json").string() + out), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
    EXPECT_EQ(run_cli("run " + (dir / "bad.json").string() + out), 2);
    EXPECT_EQ(run_cli("run " + (dir / "broken.json").string() + out), 2);
    EXPECT_EQ(run_cli("run " + (dir / "missing.json").string() + out), 2);
    EXPECT_EQ(run_cli("run " + (dir / "cfl.json").string() + " --out " + (dir / "cfl_out").string()), 3);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("compare " + (dir / "out").string() + " --reference " + (dir / "out").string()), 0);
    fs::remove_all(dir);
}
