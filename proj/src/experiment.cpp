#include "latmoo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "latmoo/metrics.hpp"
#include "latmoo/stats.hpp"

namespace latmoo::exp {

namespace fs = std::filesystem;

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* field,
                                    const char* where) {
    if (!j.contains(field))
        throw ConfigInvalid(std::string("missing field \"") + field + "\" in " + where);
    return j.at(field);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out) throw IoFailure("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoFailure("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const nlohmann::json& j) {
    if (require_field(j, "schema_version", "config").get<int>() != 1)
        throw ConfigInvalid("unsupported schema_version (expected 1)");
    ExperimentConfig cfg;
    const auto& problem = require_field(j, "problem", "config");
    require_field(problem, "kind", "problem");
    require_field(problem, "seed", "problem");
    require_field(problem, "latencies", "problem");
    cfg.problem_descriptor = problem;

    try {
        cfg.sim = strategies::sim_config_from_json(require_field(j, "sim", "config"));
        const auto& list = require_field(j, "strategies", "config");
        if (!list.is_array() || list.empty())
            throw ConfigInvalid("\"strategies\" must be a non-empty array");
        for (const auto& s : list)
            cfg.strategies.push_back(strategies::strategy_config_from_json(s));
        cfg.seeds = require_field(j, "seeds", "config").get<std::vector<std::uint64_t>>();
        if (cfg.seeds.empty()) throw ConfigInvalid("\"seeds\" must be non-empty");
        cfg.out_dir = require_field(j, "out_dir", "config").get<std::string>();
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigInvalid(e.what());
    }
    return cfg;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "strategy,seed,fe_slow,fe_fast,hv,igd\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%llu,%lld,%lld,%.17g,%.17g\n",
                      r.strategy.c_str(), static_cast<unsigned long long>(r.seed),
                      static_cast<long long>(r.fe_slow), static_cast<long long>(r.fe_fast),
                      r.hv, r.igd);
        out << buf;
    }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::vector<SummaryRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != "strategy,seed,fe_slow,fe_fast,hv,igd")
        throw IoFailure("unexpected summary CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SummaryRow r;
        char name[128];
        unsigned long long seed = 0;
        long long fe_slow = 0, fe_fast = 0;
        if (std::sscanf(line.c_str(), "%127[^,],%llu,%lld,%lld,%lf,%lf", name, &seed,
                        &fe_slow, &fe_fast, &r.hv, &r.igd) != 6)
            throw IoFailure("malformed summary row: " + line);
        r.strategy = name;
        r.seed = seed;
        r.fe_slow = fe_slow;
        r.fe_fast = fe_fast;
        rows.push_back(r);
    }
    return rows;
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::vector<MetricsRow> rows;
    std::string line;
    if (!std::getline(in, line) || line != "run,hv,igd")
        throw IoFailure("unexpected metrics CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        MetricsRow r;
        char name[192];
        if (std::sscanf(line.c_str(), "%191[^,],%lf,%lf", name, &r.hv, &r.igd) != 3)
            throw IoFailure("malformed metrics row: " + line);
        r.run = name;
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::vector<double>> read_attainment_csv(std::istream& in) {
    std::vector<std::vector<double>> points;
    std::string line;
    if (!std::getline(in, line) || line != "f1,f2")
        throw IoFailure("unexpected attainment CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double a = 0.0, b = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) != 2)
            throw IoFailure("malformed attainment row: " + line);
        points.push_back({a, b});
    }
    return points;
}

namespace {

std::string strategy_label(const strategies::StrategyConfig& cfg) {
    return cfg.name.empty() ? strategies::to_string(cfg.kind) : cfg.name;
}

struct FinishedRun {
    std::size_t strategy_index = 0;
    std::uint64_t seed = 0;
    strategies::RunOutput output;
};

}  // namespace

std::vector<SummaryRow> execute_experiment(const ExperimentConfig& config, int jobs) {
    const auto problem =
        problems::ProblemInstance::from_descriptor(config.problem_descriptor);
    config.sim.validate(problem.objective_count());

    struct Task {
        std::size_t strategy_index;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < config.strategies.size(); ++s)
        for (const auto seed : config.seeds) tasks.push_back({s, seed});

    std::vector<FinishedRun> finished(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) return;
            try {
                auto cfg = config.strategies[tasks[i].strategy_index];
                cfg.rng_seed = tasks[i].seed;
                finished[i] = FinishedRun{tasks[i].strategy_index, tasks[i].seed,
                                          strategies::run_strategy(problem, config.sim, cfg)};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty())
                    failure = strategy_label(config.strategies[tasks[i].strategy_index]) +
                              " seed " + std::to_string(tasks[i].seed) + ": " + e.what();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("run failed: " + failure);

    // Shared scoring context: one reference point and one reference set over
    // all compared runs, so hypervolume and IGD are apples-to-apples.
    metrics::Front pooled;
    for (const auto& run : finished)
        for (const auto& p : run.output.record.front) pooled.push_back(p);
    if (pooled.empty()) throw std::runtime_error("no run produced a front");
    const std::size_t m = pooled.front().size();
    std::vector<double> reference(m, 0.0);
    for (std::size_t d = 0; d < m; ++d) {
        double mx = 0.0;
        for (const auto& p : pooled) mx = std::max(mx, p[d]);
        reference[d] = mx * 1.1;
    }
    const auto reference_set = metrics::nondominated_subset(pooled);

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);

    std::vector<SummaryRow> rows;
    for (auto& run : finished) {
        auto& record = run.output.record;
        const int slow = problem.latencies().slow_objective();
        const int fast = problem.latencies().fast_objective();
        double hv = 0.0;
        try {
            hv = metrics::hypervolume_2d(record.front, reference).area;
        } catch (const metrics::EmptyFront&) {
            hv = 0.0;  // front sits on the reference boundary
        } catch (const metrics::DimensionUnsupported&) {
            hv = std::nan("");  // >2 objectives: recorded but not scored
        }
        const double igd_value = metrics::igd(record.front, reference_set);
        record.metrics = nlohmann::ordered_json{{"hv", hv},
                                                {"igd", igd_value},
                                                {"hv_reference", reference}};

        const std::string label = strategy_label(config.strategies[run.strategy_index]);
        const std::string stem = label + "_seed" + std::to_string(run.seed);
        write_file_atomic(out_dir / (stem + ".json"),
                          strategies::run_record_json(record).dump(2) + "\n");
        std::ostringstream events;
        sim::write_event_log(events, record.events);
        write_file_atomic(out_dir / (stem + ".events.jsonl"), events.str());

        rows.push_back(SummaryRow{label, run.seed,
                                  record.fe[static_cast<std::size_t>(slow)],
                                  record.fe[static_cast<std::size_t>(fast)], hv, igd_value});
    }
    std::ostringstream summary;
    write_summary_csv(summary, rows);
    write_file_atomic(out_dir / "summary.csv", summary.str());
    return rows;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_override,
            std::optional<std::string> out_override, int jobs) {
    try {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(slurp(config_path));
        } catch (const IoFailure& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const std::exception& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return kExitConfig;
        }
        ExperimentConfig cfg;
        try {
            cfg = ExperimentConfig::parse(j);
        } catch (const ConfigInvalid& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        if (seed_override) cfg.seeds = {*seed_override};
        if (out_override) cfg.out_dir = *out_override;
        const auto rows = execute_experiment(cfg, jobs);
        std::cout << "wrote " << rows.size() << " runs to " << cfg.out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

study::StudyConfig study_config_from_json(const nlohmann::json& j) {
    study::StudyConfig cfg = study::StudyConfig::defaults();
    try {
        if (j.contains("objective_counts"))
            cfg.objective_counts = j.at("objective_counts").get<std::vector<int>>();
        if (j.contains("distributions")) {
            cfg.distributions.clear();
            for (const auto& d : j.at("distributions"))
                cfg.distributions.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
        }
        if (j.contains("realizations")) cfg.realizations = j.at("realizations").get<int>();
        if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("study config: ") + e.what());
    }
    return cfg;
}

int cmd_study(const std::optional<std::string>& config_path,
              std::optional<std::uint64_t> seed_override,
              std::optional<std::string> out_override) {
    try {
        study::StudyConfig cfg = study::StudyConfig::defaults();
        std::string out_dir = "study_out";
        if (config_path) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(slurp(*config_path));
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
            try {
                if (j.contains("study")) cfg = study_config_from_json(j.at("study"));
                if (j.contains("out_dir")) out_dir = j.at("out_dir").get<std::string>();
            } catch (const ConfigInvalid& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
        }
        if (seed_override) cfg.rng_seed = *seed_override;
        if (out_override) out_dir = *out_override;

        const auto result = study::run_study(cfg);
        fs::create_directories(out_dir);
        std::ostringstream csv;
        study::write_study_csv(csv, result);
        write_file_atomic(fs::path(out_dir) / "latency_heterogeneity.csv", csv.str());
        std::cout << "wrote " << result.cells.size() << " cells to " << out_dir
                  << "/latency_heterogeneity.csv\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_compare(const std::string& summary_csv, const std::string& strategy_a,
                const std::string& strategy_b, const std::string& metric) {
    try {
        if (metric != "hv" && metric != "igd" && metric != "fe_slow" && metric != "fe_fast") {
            std::cerr << "error: unknown metric \"" << metric
                      << "\" (expected hv, igd, fe_slow or fe_fast)\n";
            return kExitConfig;
        }
        std::ifstream in(summary_csv);
        if (!in) {
            std::cerr << "error: cannot read " << summary_csv << "\n";
            return kExitConfig;
        }
        const auto rows = read_summary_csv(in);
        const auto pick = [&](const std::string& name) {
            std::vector<std::pair<std::uint64_t, double>> out;
            for (const auto& r : rows) {
                if (r.strategy != name) continue;
                double v = 0.0;
                if (metric == "hv") v = r.hv;
                else if (metric == "igd") v = r.igd;
                else if (metric == "fe_slow") v = static_cast<double>(r.fe_slow);
                else v = static_cast<double>(r.fe_fast);
                out.emplace_back(r.seed, v);
            }
            std::sort(out.begin(), out.end());
            return out;
        };
        const auto va = pick(strategy_a);
        const auto vb = pick(strategy_b);
        if (va.size() != vb.size() || va.size() < 5) {
            std::cerr << "error: need >= 5 paired seeds per strategy (got "
                      << va.size() << " vs " << vb.size() << ")\n";
            return kExitConfig;
        }
        std::vector<double> a, b;
        for (std::size_t i = 0; i < va.size(); ++i) {
            if (va[i].first != vb[i].first) {
                std::cerr << "error: seed sets of the two strategies differ\n";
                return kExitConfig;
            }
            a.push_back(va[i].second);
            b.push_back(vb[i].second);
        }
        const auto result = stats::wilcoxon_signed_rank(a, b);
        std::printf("%s vs %s on %s over %zu paired seeds\n", strategy_a.c_str(),
                    strategy_b.c_str(), metric.c_str(), a.size());
        std::printf("median difference: %.10g\n", result.median_diff);
        std::printf("one-sided wilcoxon signed-rank (H1: %s > %s): W+ = %.1f, p = %.6g\n",
                    strategy_a.c_str(), strategy_b.c_str(), result.w_plus, result.p_value);
        return kExitOk;
    } catch (const stats::InsufficientPairs& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_metrics(const std::string& run_dir) {
    try {
        std::vector<std::pair<std::string, strategies::RunRecord>> records;
        for (const auto& entry : fs::directory_iterator(run_dir)) {
            if (entry.path().extension() != ".json") continue;
            const auto j = nlohmann::json::parse(slurp(entry.path()));
            if (!j.contains("front")) continue;
            records.emplace_back(entry.path().stem().string(),
                                 strategies::run_record_from_json(j));
        }
        if (records.empty()) {
            std::cerr << "error: no run records found in " << run_dir << "\n";
            return kExitConfig;
        }
        std::sort(records.begin(), records.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        metrics::Front pooled;
        for (const auto& [name, record] : records)
            for (const auto& p : record.front) pooled.push_back(p);
        const std::size_t m = pooled.front().size();
        std::vector<double> reference(m, 0.0);
        for (std::size_t d = 0; d < m; ++d) {
            double mx = 0.0;
            for (const auto& p : pooled) mx = std::max(mx, p[d]);
            reference[d] = mx * 1.1;
        }
        const auto reference_set = metrics::nondominated_subset(pooled);

        std::ostringstream csv;
        csv << "run,hv,igd\n";
        char buf[256];
        std::map<std::string, std::vector<metrics::Front>> per_strategy;
        for (const auto& [name, record] : records) {
            double hv = 0.0;
            try {
                hv = metrics::hypervolume_2d(record.front, reference).area;
            } catch (const metrics::EmptyFront&) {
                hv = 0.0;
            }
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", name.c_str(), hv,
                          metrics::igd(record.front, reference_set));
            csv << buf;
            const auto cut = name.find("_seed");
            if (cut != std::string::npos && m == 2)
                per_strategy[name.substr(0, cut)].push_back(record.front);
        }
        write_file_atomic(fs::path(run_dir) / "metrics.csv", csv.str());

        // Median attainment polylines, one two-column CSV per strategy.
        for (const auto& [name, fronts] : per_strategy) {
            const auto boundary = metrics::attainment_summary(fronts, 0.5);
            std::ostringstream att;
            att << "f1,f2\n";
            for (const auto& p : boundary) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p[0], p[1]);
                att << buf;
            }
            write_file_atomic(fs::path(run_dir) / ("attainment_" + name + ".csv"),
                              att.str());
        }
        std::cout << "wrote metrics for " << records.size() << " runs to " << run_dir
                  << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace latmoo::exp
