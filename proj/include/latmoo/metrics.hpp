#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace latmoo::metrics {

struct EmptyFront : std::runtime_error {
    explicit EmptyFront(const std::string& m) : std::runtime_error(m) {}
};
struct EmptySet : std::runtime_error {
    explicit EmptySet(const std::string& m) : std::runtime_error(m) {}
};
struct DimensionUnsupported : std::runtime_error {
    explicit DimensionUnsupported(const std::string& m) : std::runtime_error(m) {}
};

/// Objective vectors, minimization orientation.
using Front = std::vector<std::vector<double>>;

/// Members not strictly dominated by another (duplicates collapse to one).
Front nondominated_subset(const Front& front);

struct HypervolumeResult {
    double area = 0.0;
    int discarded = 0;  // points that failed to strictly dominate the reference
};

/// Exact bi-objective hypervolume against `reference`. Points that do not
/// strictly dominate the reference are dropped (counted in `discarded`);
/// EmptyFront if nothing remains.
HypervolumeResult hypervolume_2d(const Front& front, const std::vector<double>& reference);

/// Mean Euclidean distance from each reference point to its nearest front
/// member.
double igd(const Front& front, const Front& reference_set);

/// Staircase attained by at least ceil(level * runs) of the given fronts,
/// evaluated on the grid of observed coordinates. Vertices are emitted in
/// ascending first-objective order, one per step of the boundary.
Front attainment_summary(const std::vector<Front>& fronts, double level);

}  // namespace latmoo::metrics
