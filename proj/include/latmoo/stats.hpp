#pragma once

#include <span>
#include <stdexcept>
#include <string>

namespace latmoo::stats {

struct InsufficientPairs : std::runtime_error {
    explicit InsufficientPairs(const std::string& m) : std::runtime_error(m) {}
};

struct WilcoxonResult {
    double p_value = 1.0;     // one-sided, H1: a > b
    double median_diff = 0.0; // median of a_i - b_i over all pairs
    double w_plus = 0.0;      // signed-rank statistic of the positive differences
    int pairs_used = 0;       // after dropping zero differences
};

/// Paired one-sided Wilcoxon signed-rank test (alternative: a > b). Zero
/// differences are dropped; tied magnitudes get average ranks. The statistic's
/// null distribution is enumerated exactly up to 50 effective pairs, larger
/// samples use the normal approximation with tie correction. Needs >= 5 pairs.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

}  // namespace latmoo::stats
