#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "latmoo/experiment.hpp"

using namespace latmoo;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("latmoo_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::json small_experiment(const std::string& out_dir) {
    return nlohmann::json{
        {"schema_version", 1},
        {"problem",
         {{"kind", "corr_toy"},
          {"params", {{"rho", 0.7}, {"n", 4}}},
          {"seed", 5},
          {"latencies", {1, 5}}}},
        {"sim",
         {{"total_time_steps", 30}, {"batch_capacity", 4}, {"stopping_mode", "time_steps"}}},
        {"strategies",
         {{{"kind", "waiting"}}, {{"kind", "brood_interleave"}}}},
        {"seeds", {1, 2, 3}},
        {"out_dir", out_dir},
    };
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("an experiment writes one record and one event log per run plus a summary") {
    const auto dir = fresh_dir("cardinality");
    const auto cfg = exp::ExperimentConfig::parse(small_experiment((dir / "out").string()));
    const auto rows = exp::execute_experiment(cfg);
    CHECK(rows.size() == 6);
    int json_files = 0, event_files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "out")) {
        const auto name = entry.path().filename().string();
        if (name == "summary.csv") continue;
        if (name.ends_with(".events.jsonl"))
            ++event_files;
        else if (name.ends_with(".json"))
            ++json_files;
    }
    CHECK(json_files == 6);
    CHECK(event_files == 6);
    CHECK(fs::exists(dir / "out" / "summary.csv"));

    // Each record round-trips through its reader.
    const auto record_text = slurp(dir / "out" / "waiting_seed1.json");
    const auto record =
        strategies::run_record_from_json(nlohmann::json::parse(record_text));
    CHECK(record.seed == 1);
    CHECK(record.metrics.contains("hv"));
    CHECK(record.metrics.contains("igd"));
    std::istringstream summary_in(slurp(dir / "out" / "summary.csv"));
    const auto parsed = exp::read_summary_csv(summary_in);
    CHECK(parsed.size() == 6);
    CHECK(parsed[0].strategy == "waiting");
}

TEST_CASE("identical configs produce byte-identical outputs") {
    const auto dir = fresh_dir("determinism");
    const auto cfg_a = exp::ExperimentConfig::parse(small_experiment((dir / "a").string()));
    const auto cfg_b = exp::ExperimentConfig::parse(small_experiment((dir / "b").string()));
    exp::execute_experiment(cfg_a);
    exp::execute_experiment(cfg_b, 3);  // parallel execution must not matter
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const auto peer = dir / "b" / entry.path().filename();
        REQUIRE(fs::exists(peer));
        CHECK(slurp(entry.path()) == slurp(peer));
    }
}

TEST_CASE("config validation names the offending field") {
    auto j = small_experiment("unused");
    j["problem"].erase("latencies");
    try {
        exp::ExperimentConfig::parse(j);
        FAIL("expected ConfigInvalid");
    } catch (const exp::ConfigInvalid& e) {
        CHECK(std::string(e.what()).find("latencies") != std::string::npos);
    }
    auto no_seeds = small_experiment("unused");
    no_seeds["seeds"] = nlohmann::json::array();
    CHECK_THROWS_AS(exp::ExperimentConfig::parse(no_seeds), exp::ConfigInvalid);
    auto bad_version = small_experiment("unused");
    bad_version["schema_version"] = 2;
    CHECK_THROWS_AS(exp::ExperimentConfig::parse(bad_version), exp::ConfigInvalid);
}

TEST_CASE("cmd_run surfaces config errors as exit status 2") {
    const auto dir = fresh_dir("cmdrun");
    auto j = small_experiment((dir / "out").string());
    j["problem"].erase("latencies");
    const auto cfg_path = dir / "bad.json";
    std::ofstream(cfg_path) << j.dump(2);
    CHECK(exp::cmd_run(cfg_path.string(), std::nullopt, std::nullopt, 1) == exp::kExitConfig);
    CHECK(exp::cmd_run((dir / "missing.json").string(), std::nullopt, std::nullopt, 1) ==
          exp::kExitConfig);

    std::ofstream(dir / "good.json") << small_experiment((dir / "out").string()).dump(2);
    CHECK(exp::cmd_run((dir / "good.json").string(), std::nullopt, std::nullopt, 2) ==
          exp::kExitOk);
    // Seed override narrows the sweep to a single seed per strategy.
    CHECK(exp::cmd_run((dir / "good.json").string(), 42, (dir / "seeded").string(), 1) ==
          exp::kExitOk);
    int runs = 0;
    for (const auto& entry : fs::directory_iterator(dir / "seeded"))
        if (entry.path().filename().string().ends_with(".events.jsonl")) ++runs;
    CHECK(runs == 2);
}

TEST_CASE("cmd_study writes the default 75-cell grid and honors seeds") {
    const auto dir = fresh_dir("study");
    CHECK(exp::cmd_study(std::nullopt, 11, (dir / "s1").string()) == exp::kExitOk);
    std::ifstream in(dir / "s1" / "latency_heterogeneity.csv");
    REQUIRE(in.good());
    const auto result = study::read_study_csv(in);
    CHECK(result.cells.size() == 75);
    int markers = 0;
    for (const auto& cell : result.cells)
        if (!cell.defined) ++markers;
    CHECK(markers == 3);

    CHECK(exp::cmd_study(std::nullopt, 11, (dir / "s2").string()) == exp::kExitOk);
    CHECK(slurp(dir / "s1" / "latency_heterogeneity.csv") ==
          slurp(dir / "s2" / "latency_heterogeneity.csv"));
    CHECK(exp::cmd_study(std::nullopt, 12, (dir / "s3").string()) == exp::kExitOk);
    CHECK(slurp(dir / "s1" / "latency_heterogeneity.csv") !=
          slurp(dir / "s3" / "latency_heterogeneity.csv"));

    // Two realizations already yield finite standard errors.
    const auto cfg_path = dir / "tiny.json";
    std::ofstream(cfg_path) << nlohmann::json{
        {"study",
         {{"objective_counts", {2, 3}},
          {"distributions", {{2.0, 8.0}}},
          {"realizations", 2},
          {"rng_seed", 1}}},
        {"out_dir", (dir / "tiny").string()}}.dump();
    CHECK(exp::cmd_study(cfg_path.string(), std::nullopt, std::nullopt) == exp::kExitOk);
    std::ifstream tiny_in(dir / "tiny" / "latency_heterogeneity.csv");
    for (const auto& cell : study::read_study_csv(tiny_in).cells) {
        CHECK(std::isfinite(cell.se_min));
        CHECK(std::isfinite(cell.se_max));
    }
}

TEST_CASE("cmd_compare reports ranks and guards its inputs") {
    const auto dir = fresh_dir("compare");
    std::vector<exp::SummaryRow> rows;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        rows.push_back({"alpha", seed, 10, 10, 0.5 + 0.01 * static_cast<double>(seed), 0.1});
        rows.push_back({"beta", seed, 10, 10, 0.4 + 0.01 * static_cast<double>(seed), 0.2});
    }
    const auto csv = dir / "summary.csv";
    {
        std::ofstream out(csv);
        exp::write_summary_csv(out, rows);
    }
    CHECK(exp::cmd_compare(csv.string(), "alpha", "beta", "hv") == exp::kExitOk);
    CHECK(exp::cmd_compare(csv.string(), "alpha", "beta", "nope") == exp::kExitConfig);
    CHECK(exp::cmd_compare(csv.string(), "alpha", "gamma", "hv") == exp::kExitConfig);
    CHECK(exp::cmd_compare((dir / "missing.csv").string(), "a", "b", "hv") ==
          exp::kExitConfig);
}

TEST_CASE("cmd_metrics recomputes indicators and attainment surfaces") {
    const auto dir = fresh_dir("metrics");
    std::ofstream(dir / "cfg.json") << small_experiment((dir / "out").string()).dump();
    REQUIRE(exp::cmd_run((dir / "cfg.json").string(), std::nullopt, std::nullopt, 1) ==
            exp::kExitOk);
    CHECK(exp::cmd_metrics((dir / "out").string()) == exp::kExitOk);
    CHECK(fs::exists(dir / "out" / "metrics.csv"));
    CHECK(fs::exists(dir / "out" / "attainment_waiting.csv"));
    CHECK(fs::exists(dir / "out" / "attainment_brood_interleave.csv"));

    // Both emitted formats round-trip through their readers.
    std::istringstream metrics_in(slurp(dir / "out" / "metrics.csv"));
    const auto metric_rows = exp::read_metrics_csv(metrics_in);
    CHECK(metric_rows.size() == 6);
    for (const auto& row : metric_rows) CHECK(row.hv >= 0.0);
    std::istringstream att_in(slurp(dir / "out" / "attainment_waiting.csv"));
    const auto polyline = exp::read_attainment_csv(att_in);
    CHECK(!polyline.empty());
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        CHECK(polyline[i][0] > polyline[i - 1][0]);
        CHECK(polyline[i][1] < polyline[i - 1][1]);
    }
    CHECK(exp::cmd_metrics((dir / "empty").string()) != exp::kExitOk);
}
