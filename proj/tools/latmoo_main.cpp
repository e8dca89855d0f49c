#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "latmoo/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"latmoo - multiobjective optimization under heterogeneous "
                 "per-objective evaluation latencies"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    int jobs = 1;

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seed", seed_override, "run a single seed instead of the config list");
    run->add_option("--out", out_override, "output directory override");
    run->add_option("--jobs", jobs, "parallel (strategy, seed) runs")->check(CLI::PositiveNumber);

    auto* study = app.add_subcommand(
        "study", "latency-heterogeneity study (objective count x Beta distributions)");
    std::string study_config;
    study->add_option("--config", study_config, "study config (JSON); defaults when omitted");
    study->add_option("--seed", seed_override, "seed override");
    study->add_option("--out", out_override, "output directory override");

    auto* compare = app.add_subcommand(
        "compare", "paired one-sided Wilcoxon signed-rank test between two strategies");
    std::string summary_csv, strategy_a, strategy_b, metric = "hv";
    compare->add_option("summary", summary_csv, "summary.csv from a run")->required();
    compare->add_option("strategy_a", strategy_a, "first strategy name")->required();
    compare->add_option("strategy_b", strategy_b, "second strategy name")->required();
    compare->add_option("metric", metric, "hv, igd, fe_slow or fe_fast");

    auto* metrics = app.add_subcommand(
        "metrics", "recompute indicators and attainment surfaces from stored runs");
    std::string run_dir;
    metrics->add_option("--out", run_dir, "directory holding RunRecord JSON files")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return latmoo::exp::cmd_run(config_path, seed_override, out_override, jobs);
    if (study->parsed())
        return latmoo::exp::cmd_study(
            study_config.empty() ? std::nullopt : std::optional<std::string>(study_config),
            seed_override, out_override);
    if (compare->parsed())
        return latmoo::exp::cmd_compare(summary_csv, strategy_a, strategy_b, metric);
    return latmoo::exp::cmd_metrics(run_dir);
}
