#include "latmoo/het_study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>

namespace latmoo::study {

StudyConfig StudyConfig::defaults() {
    StudyConfig cfg;
    cfg.objective_counts.resize(25);
    std::iota(cfg.objective_counts.begin(), cfg.objective_counts.end(), 1);
    cfg.distributions = {{2.0, 8.0}, {8.0, 2.0}, {5.0, 5.0}};
    cfg.realizations = 100;
    cfg.rng_seed = 0;
    return cfg;
}

void StudyConfig::validate() const {
    if (objective_counts.empty()) throw std::invalid_argument("no objective counts given");
    for (const int m : objective_counts)
        if (m < 1) throw std::invalid_argument("objective counts must be >= 1");
    if (distributions.empty()) throw std::invalid_argument("no distributions given");
    for (const auto& [a, b] : distributions)
        if (!(a > 0.0) || !(b > 0.0))
            throw InvalidShape("Beta shape parameters must be positive");
    if (realizations < 2)
        throw std::invalid_argument("need >= 2 realizations for a standard error");
}

std::vector<double> sample_latencies(int m, double alpha, double beta, rng::Engine& eng) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw InvalidShape("Beta shape parameters must be positive");
    std::vector<double> out(static_cast<std::size_t>(m));
    for (auto& v : out) v = rng::beta_draw(eng, alpha, beta);
    return out;
}

std::pair<double, double> pairwise_extremes(const std::vector<double>& latencies) {
    if (latencies.size() < 2)
        throw TooFewObjectives("pairwise extremes need at least two objectives");
    std::vector<double> sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    double min_diff = sorted.back() - sorted.front();
    for (std::size_t i = 1; i < sorted.size(); ++i)
        min_diff = std::min(min_diff, sorted[i] - sorted[i - 1]);
    return {min_diff, sorted.back() - sorted.front()};
}

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_stderr(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd / std::sqrt(n)};
}

}  // namespace

StudyResult run_study(const StudyConfig& config) {
    config.validate();
    const int max_m =
        *std::max_element(config.objective_counts.begin(), config.objective_counts.end());

    StudyResult result;
    for (std::size_t d = 0; d < config.distributions.size(); ++d) {
        const auto [alpha, beta] = config.distributions[d];
        // Common random numbers across objective counts: each realization
        // draws one max-length latency vector and every m-cell reads its
        // prefix. Marginals per cell are unchanged, while the extremes become
        // monotone in m realization by realization, so the mean trends are
        // noise-free.
        std::vector<std::vector<double>> realizations;
        realizations.reserve(static_cast<std::size_t>(config.realizations));
        for (int r = 0; r < config.realizations; ++r) {
            rng::Engine eng(
                rng::hash_mix(config.rng_seed, d, static_cast<std::uint64_t>(r)));
            realizations.push_back(sample_latencies(max_m, alpha, beta, eng));
        }
        std::vector<double> mins, maxs;
        for (const int m : config.objective_counts) {
            StudyCell cell;
            cell.objectives = m;
            cell.alpha = alpha;
            cell.beta = beta;
            if (m >= 2) {
                mins.clear();
                maxs.clear();
                for (const auto& draw : realizations) {
                    const std::vector<double> prefix(draw.begin(),
                                                     draw.begin() + m);
                    const auto [mn, mx] = pairwise_extremes(prefix);
                    mins.push_back(mn);
                    maxs.push_back(mx);
                }
                const auto min_stats = mean_and_stderr(mins);
                const auto max_stats = mean_and_stderr(maxs);
                cell.defined = true;
                cell.mean_min = min_stats.mean;
                cell.se_min = min_stats.se;
                cell.mean_max = max_stats.mean;
                cell.se_max = max_stats.se;
            }
            result.cells.push_back(cell);
        }
    }
    std::sort(result.cells.begin(), result.cells.end(),
              [](const StudyCell& a, const StudyCell& b) {
                  if (a.alpha != b.alpha) return a.alpha < b.alpha;
                  if (a.beta != b.beta) return a.beta < b.beta;
                  return a.objectives < b.objectives;
              });
    return result;
}

void write_study_csv(std::ostream& out, const StudyResult& result) {
    out << "m,alpha,beta,mean_min,se_min,mean_max,se_max\n";
    char buf[256];
    for (const auto& cell : result.cells) {
        if (cell.defined) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          cell.objectives, cell.alpha, cell.beta, cell.mean_min, cell.se_min,
                          cell.mean_max, cell.se_max);
        } else {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,nan,nan,nan,nan\n",
                          cell.objectives, cell.alpha, cell.beta);
        }
        out << buf;
    }
}

StudyResult read_study_csv(std::istream& in) {
    StudyResult result;
    std::string line;
    if (!std::getline(in, line) || line != "m,alpha,beta,mean_min,se_min,mean_max,se_max")
        throw std::runtime_error("unexpected study CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        StudyCell cell;
        char min_buf[64], se_min_buf[64], max_buf[64], se_max_buf[64];
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%63[^,],%63[^,],%63[^,],%63s",
                        &cell.objectives, &cell.alpha, &cell.beta, min_buf, se_min_buf,
                        max_buf, se_max_buf) != 7)
            throw std::runtime_error("malformed study CSV row: " + line);
        cell.defined = std::string(min_buf) != "nan";
        if (cell.defined) {
            cell.mean_min = std::stod(min_buf);
            cell.se_min = std::stod(se_min_buf);
            cell.mean_max = std::stod(max_buf);
            cell.se_max = std::stod(se_max_buf);
        }
        result.cells.push_back(cell);
    }
    return result;
}

}  // namespace latmoo::study
