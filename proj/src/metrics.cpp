#include "latmoo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latmoo/moea_core.hpp"

namespace latmoo::metrics {

Front nondominated_subset(const Front& front) {
    Front out;
    for (const auto& p : front) {
        bool keep = true;
        for (const auto& q : front) {
            if (&q == &p) continue;
            if (moea::dominates(q, p)) {
                keep = false;
                break;
            }
        }
        if (keep && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

HypervolumeResult hypervolume_2d(const Front& front, const std::vector<double>& reference) {
    if (reference.size() != 2)
        throw DimensionUnsupported("hypervolume_2d needs a 2-d reference point");
    HypervolumeResult result;
    Front pts;
    for (const auto& p : front) {
        if (p.size() != 2)
            throw DimensionUnsupported("hypervolume_2d needs 2-d objective vectors");
        if (p[0] < reference[0] && p[1] < reference[1])
            pts.push_back(p);
        else
            ++result.discarded;
    }
    if (pts.empty()) throw EmptyFront("no point strictly dominates the reference");

    std::sort(pts.begin(), pts.end());
    // Left-to-right sweep; only points improving the best second objective so
    // far add a rectangle slice, the rest are dominated.
    double best_y = reference[1];
    for (const auto& p : pts) {
        if (p[1] >= best_y) continue;
        result.area += (reference[0] - p[0]) * (best_y - p[1]);
        best_y = p[1];
    }
    return result;
}

double igd(const Front& front, const Front& reference_set) {
    if (front.empty()) throw EmptySet("front is empty");
    if (reference_set.empty()) throw EmptySet("reference set is empty");
    const std::size_t m = front.front().size();
    for (const auto& p : front)
        if (p.size() != m) throw DimensionUnsupported("front vectors differ in length");
    double total = 0.0;
    for (const auto& r : reference_set) {
        if (r.size() != m)
            throw DimensionUnsupported("reference vectors differ from front dimension");
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : front) {
            double d = 0.0;
            for (std::size_t i = 0; i < m; ++i) d += (p[i] - r[i]) * (p[i] - r[i]);
            best = std::min(best, d);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(reference_set.size());
}

Front attainment_summary(const std::vector<Front>& fronts, double level) {
    if (fronts.empty()) throw EmptySet("no runs given");
    if (!(level > 0.0) || level > 1.0)
        throw std::invalid_argument("level must lie in (0, 1]");
    for (const auto& front : fronts) {
        if (front.empty()) throw EmptyFront("a run has an empty front");
        for (const auto& p : front)
            if (p.size() != 2)
                throw DimensionUnsupported("attainment surfaces are bi-objective only");
    }
    const auto needed =
        static_cast<std::size_t>(std::ceil(level * static_cast<double>(fronts.size())));

    std::vector<double> xs;
    for (const auto& front : fronts)
        for (const auto& p : front) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    // g_r(x): best second objective run r attains at first objective <= x.
    Front boundary;
    double prev_y = std::numeric_limits<double>::infinity();
    std::vector<double> attained;
    for (const double x : xs) {
        attained.clear();
        for (const auto& front : fronts) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : front)
                if (p[0] <= x) best = std::min(best, p[1]);
            if (best < std::numeric_limits<double>::infinity()) attained.push_back(best);
        }
        if (attained.size() < needed) continue;
        std::sort(attained.begin(), attained.end());
        const double y = attained[needed - 1];
        if (y < prev_y) {
            boundary.push_back({x, y});
            prev_y = y;
        }
    }
    return boundary;
}

}  // namespace latmoo::metrics
