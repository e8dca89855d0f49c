#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "latmoo/het_study.hpp"
#include "latmoo/strategies.hpp"

namespace latmoo::exp {

struct ConfigInvalid : std::runtime_error {
    explicit ConfigInvalid(const std::string& m) : std::runtime_error(m) {}
};
struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& m) : std::runtime_error(m) {}
};

// Stable exit-status contract of every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// One experiment: a shared problem and simulation budget, several strategies,
/// a common list of seeds. Keeping problem and budget fixed across strategies
/// is what makes the per-strategy comparison fair.
struct ExperimentConfig {
    nlohmann::ordered_json problem_descriptor;
    sim::SimConfig sim;
    std::vector<strategies::StrategyConfig> strategies;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;

    static ExperimentConfig parse(const nlohmann::json& j);
};

struct SummaryRow {
    std::string strategy;
    std::uint64_t seed = 0;
    std::int64_t fe_slow = 0;
    std::int64_t fe_fast = 0;
    double hv = 0.0;
    double igd = 0.0;
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

struct MetricsRow {
    std::string run;
    double hv = 0.0;
    double igd = 0.0;
};

std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::vector<std::vector<double>> read_attainment_csv(std::istream& in);

/// Runs every (strategy, seed) pair, writes one RunRecord JSON plus one event
/// JSONL per run and a summary CSV; `jobs` > 1 executes runs concurrently.
/// Returns the summary rows in output order.
std::vector<SummaryRow> execute_experiment(const ExperimentConfig& config, int jobs = 1);

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_override,
            std::optional<std::string> out_override, int jobs);
int cmd_study(const std::optional<std::string>& config_path,
              std::optional<std::uint64_t> seed_override,
              std::optional<std::string> out_override);
int cmd_compare(const std::string& summary_csv, const std::string& strategy_a,
                const std::string& strategy_b, const std::string& metric);
int cmd_metrics(const std::string& run_dir);

/// Study config parsing shared by cmd_study and tests.
study::StudyConfig study_config_from_json(const nlohmann::json& j);

}  // namespace latmoo::exp
