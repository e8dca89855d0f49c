#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latmoo/rng.hpp"

namespace latmoo::study {

struct InvalidShape : std::runtime_error {
    explicit InvalidShape(const std::string& m) : std::runtime_error(m) {}
};
struct TooFewObjectives : std::runtime_error {
    explicit TooFewObjectives(const std::string& m) : std::runtime_error(m) {}
};

/// Sweep over objective counts x latency distributions: how far apart do the
/// per-objective latencies of one problem spread as objectives are added?
struct StudyConfig {
    std::vector<int> objective_counts;           // default 1..25
    std::vector<std::pair<double, double>> distributions;  // Beta(alpha, beta) pairs
    int realizations = 100;
    std::uint64_t rng_seed = 0;

    static StudyConfig defaults();
    void validate() const;
};

struct StudyCell {
    int objectives = 0;
    double alpha = 0.0;
    double beta = 0.0;
    bool defined = false;  // extremes need >= 2 objectives
    double mean_min = 0.0;
    double se_min = 0.0;
    double mean_max = 0.0;
    double se_max = 0.0;
};

struct StudyResult {
    std::vector<StudyCell> cells;  // sorted by (alpha, beta, objectives)
};

/// m independent Beta(alpha, beta) latency draws on [0, 1].
std::vector<double> sample_latencies(int m, double alpha, double beta, rng::Engine& eng);

/// (smallest pairwise |k_i - k_j|, max(k) - min(k)); needs m >= 2.
std::pair<double, double> pairwise_extremes(const std::vector<double>& latencies);

StudyResult run_study(const StudyConfig& config);

/// One row per cell: m, alpha, beta, mean_min, se_min, mean_max, se_max.
/// Cells with undefined extremes (m = 1) carry "nan" markers.
void write_study_csv(std::ostream& out, const StudyResult& result);
StudyResult read_study_csv(std::istream& in);

}  // namespace latmoo::study
