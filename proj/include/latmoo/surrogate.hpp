#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latmoo/rng.hpp"

namespace latmoo::surrogate {

struct DegenerateSet : std::runtime_error {
    explicit DegenerateSet(const std::string& m) : std::runtime_error(m) {}
};
struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& m) : std::runtime_error(m) {}
};
struct TooFewCandidates : std::runtime_error {
    explicit TooFewCandidates(const std::string& m) : std::runtime_error(m) {}
};

struct Prediction {
    double mean = 0.0;
    double uncertainty = 0.0;  // distance to nearest training point over bandwidth
};

using Sample = std::pair<std::vector<double>, double>;

/// Gaussian-kernel RBF interpolant with a small ridge jitter. Bandwidth is
/// the median pairwise distance of the (deduplicated) training inputs.
/// Uncertainty is a distance proxy: zero at training points, growing with the
/// distance to the nearest one.
class RbfModel {
  public:
    /// Duplicate inputs are merged by averaging their targets; fewer than two
    /// distinct inputs throw DegenerateSet.
    static RbfModel fit(const std::vector<Sample>& samples);

    Prediction predict(const std::vector<double>& x) const;

    std::size_t dimension() const { return dim_; }
    std::size_t training_size() const { return inputs_.size(); }
    double bandwidth() const { return bandwidth_; }

  private:
    std::size_t dim_ = 0;
    double bandwidth_ = 1.0;
    std::vector<std::vector<double>> inputs_;
    std::vector<double> weights_;
};

/// For each center, a Latin-hypercube design of `count` points inside the box
/// of per-dimension width `box_fraction` * (hi - lo), centered there and
/// clipped to the bounds. Results are concatenated center by center.
std::vector<std::vector<double>> lhs_sample(const std::vector<std::vector<double>>& centers,
                                            int count, double box_fraction,
                                            const std::vector<double>& lower,
                                            const std::vector<double>& upper,
                                            rng::Engine& eng);

/// Infill selection: candidates nondominated under the models' predicted
/// means come first, ordered by descending summed uncertainty; remaining
/// candidates follow under the same uncertainty order. Exact ties are broken
/// by the caller's stream. Returns the indices of the first `u` picks.
std::vector<std::size_t> acquire(const std::vector<RbfModel>& models,
                                 const std::vector<std::vector<double>>& candidates,
                                 std::size_t u, rng::Engine& eng);

}  // namespace latmoo::surrogate
