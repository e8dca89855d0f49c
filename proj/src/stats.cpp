#include "latmoo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace latmoo::stats {

namespace {

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Exact tail P(W+ >= observed) over the 2^n equiprobable sign assignments,
// using doubled ranks so average ranks stay integral.
double exact_tail(const std::vector<std::int64_t>& doubled_ranks, std::int64_t observed) {
    const std::int64_t total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(),
                                               std::int64_t{0});
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    std::int64_t reached = 0;
    for (const std::int64_t r : doubled_ranks) {
        reached += r;
        for (std::int64_t s = reached; s >= r; --s)
            count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];
    }
    double tail = 0.0;
    for (std::int64_t s = std::max<std::int64_t>(observed, 0); s <= total; ++s)
        tail += count[static_cast<std::size_t>(s)];
    return tail / std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InsufficientPairs("paired test needs columns of equal length");
    if (a.size() < 5) throw InsufficientPairs("need at least 5 paired observations");

    std::vector<double> diffs(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];

    WilcoxonResult result;
    result.median_diff = median_of(diffs);

    std::vector<double> nonzero;
    for (const double d : diffs)
        if (d != 0.0) nonzero.push_back(d);
    result.pairs_used = static_cast<int>(nonzero.size());
    if (nonzero.empty()) {
        result.p_value = 1.0;
        return result;
    }

    std::vector<std::size_t> order(nonzero.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(nonzero[x]) < std::abs(nonzero[y]);
    });

    // Average ranks over tied magnitudes, kept as doubled integers.
    std::vector<std::int64_t> doubled_rank(nonzero.size(), 0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               std::abs(nonzero[order[j + 1]]) == std::abs(nonzero[order[i]]))
            ++j;
        const std::int64_t doubled_avg =
            static_cast<std::int64_t>(i + 1) + static_cast<std::int64_t>(j + 1);
        for (std::size_t k = i; k <= j; ++k) doubled_rank[order[k]] = doubled_avg;
        i = j + 1;
    }

    std::int64_t doubled_w_plus = 0;
    for (std::size_t k = 0; k < nonzero.size(); ++k)
        if (nonzero[k] > 0.0) doubled_w_plus += doubled_rank[k];
    result.w_plus = static_cast<double>(doubled_w_plus) / 2.0;

    const std::size_t n = nonzero.size();
    if (n <= 50) {
        result.p_value = exact_tail(doubled_rank, doubled_w_plus);
    } else {
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        double tie_term = 0.0;
        std::vector<double> mags;
        for (const double d : nonzero) mags.push_back(std::abs(d));
        std::sort(mags.begin(), mags.end());
        for (std::size_t s = 0; s < mags.size();) {
            std::size_t e = s;
            while (e + 1 < mags.size() && mags[e + 1] == mags[s]) ++e;
            const double t = static_cast<double>(e - s + 1);
            tie_term += t * t * t - t;
            s = e + 1;
        }
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double z = (result.w_plus - mean - 0.5) / std::sqrt(var);
        result.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    }
    return result;
}

}  // namespace latmoo::stats
