#include "latmoo/surrogate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "latmoo/moea_core.hpp"

namespace latmoo::surrogate {

namespace {

double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

constexpr double kRidgeJitter = 1e-8;

}  // namespace

RbfModel RbfModel::fit(const std::vector<Sample>& samples) {
    if (samples.size() < 2) throw DegenerateSet("need at least two training samples");
    const std::size_t dim = samples.front().first.size();
    if (dim == 0) throw DimensionMismatch("training inputs must be non-empty vectors");
    for (const auto& [x, y] : samples)
        if (x.size() != dim) throw DimensionMismatch("training inputs differ in dimension");

    // Merge exact duplicates by mean target, preserving first-seen order.
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    std::vector<int> counts;
    for (const auto& [x, y] : samples) {
        bool merged = false;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            if (inputs[i] == x) {
                targets[i] += y;
                ++counts[i];
                merged = true;
                break;
            }
        }
        if (!merged) {
            inputs.push_back(x);
            targets.push_back(y);
            counts.push_back(1);
        }
    }
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] /= counts[i];
    const std::size_t n = inputs.size();
    if (n < 2) throw DegenerateSet("all training inputs are identical");

    std::vector<double> pairwise;
    pairwise.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pairwise.push_back(std::sqrt(sq_distance(inputs[i], inputs[j])));
    std::sort(pairwise.begin(), pairwise.end());
    const std::size_t mid = pairwise.size() / 2;
    double bandwidth = pairwise.size() % 2 == 1
                           ? pairwise[mid]
                           : 0.5 * (pairwise[mid - 1] + pairwise[mid]);
    if (bandwidth <= 0.0) bandwidth = 1.0;

    Eigen::MatrixXd kernel(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = std::exp(-sq_distance(inputs[i], inputs[j]) /
                                      (bandwidth * bandwidth));
            kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            kernel(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    Eigen::MatrixXd regularized = kernel;
    regularized.diagonal().array() += kRidgeJitter;
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = targets[i];
    const auto solver = regularized.ldlt();
    Eigen::VectorXd w = solver.solve(y);
    // One refinement step against the unregularized kernel knocks the
    // training residual from jitter-scale down to interpolation accuracy.
    w += solver.solve(y - kernel * w);

    RbfModel model;
    model.dim_ = dim;
    model.bandwidth_ = bandwidth;
    model.inputs_ = std::move(inputs);
    model.weights_.assign(w.data(), w.data() + w.size());
    return model;
}

Prediction RbfModel::predict(const std::vector<double>& x) const {
    if (x.size() != dim_) throw DimensionMismatch("query dimension mismatch");
    double mean = 0.0;
    double nearest_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        const double d2 = sq_distance(inputs_[i], x);
        nearest_sq = std::min(nearest_sq, d2);
        mean += weights_[i] * std::exp(-d2 / (bandwidth_ * bandwidth_));
    }
    return Prediction{mean, std::sqrt(nearest_sq) / bandwidth_};
}

std::vector<std::vector<double>> lhs_sample(const std::vector<std::vector<double>>& centers,
                                            int count, double box_fraction,
                                            const std::vector<double>& lower,
                                            const std::vector<double>& upper,
                                            rng::Engine& eng) {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    if (!(box_fraction > 0.0) || box_fraction > 1.0)
        throw std::invalid_argument("box_fraction must lie in (0, 1]");
    if (lower.size() != upper.size())
        throw std::invalid_argument("bounds differ in dimension");

    const std::size_t dim = lower.size();
    std::vector<std::vector<double>> out;
    out.reserve(centers.size() * static_cast<std::size_t>(count));
    std::vector<std::size_t> perm(static_cast<std::size_t>(count));
    for (const auto& center : centers) {
        if (center.size() != dim)
            throw std::invalid_argument("center dimension does not match bounds");
        std::vector<std::vector<double>> design(
            static_cast<std::size_t>(count), std::vector<double>(dim, 0.0));
        for (std::size_t d = 0; d < dim; ++d) {
            const double width = box_fraction * (upper[d] - lower[d]);
            double lo = center[d] - 0.5 * width;
            double hi = center[d] + 0.5 * width;
            lo = std::max(lo, lower[d]);
            hi = std::min(hi, upper[d]);
            if (hi < lo) hi = lo;
            // one sample per stratum, strata visited in shuffled order
            std::iota(perm.begin(), perm.end(), 0u);
            for (std::size_t i = perm.size(); i > 1; --i)
                std::swap(perm[i - 1], perm[rng::index_below(eng, i)]);
            for (std::size_t s = 0; s < perm.size(); ++s) {
                const double frac =
                    (static_cast<double>(perm[s]) + rng::uniform01(eng)) /
                    static_cast<double>(count);
                design[s][d] = lo + frac * (hi - lo);
            }
        }
        for (auto& point : design) out.push_back(std::move(point));
    }
    return out;
}

std::vector<std::size_t> acquire(const std::vector<RbfModel>& models,
                                 const std::vector<std::vector<double>>& candidates,
                                 std::size_t u, rng::Engine& eng) {
    if (u > candidates.size())
        throw TooFewCandidates("requested " + std::to_string(u) + " picks from " +
                               std::to_string(candidates.size()) + " candidates");
    std::vector<std::vector<double>> means(candidates.size());
    std::vector<double> uncertainty(candidates.size(), 0.0);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        means[i].reserve(models.size());
        for (const auto& model : models) {
            const auto pred = model.predict(candidates[i]);
            means[i].push_back(pred.mean);
            uncertainty[i] += pred.uncertainty;
        }
    }
    const auto fronts = moea::nondominated_sort(means);
    std::vector<int> rank(candidates.size(), 0);
    for (std::size_t r = 0; r < fronts.size(); ++r)
        for (const std::size_t i : fronts[r]) rank[i] = static_cast<int>(r);

    std::vector<double> tiebreak(candidates.size());
    for (auto& t : tiebreak) t = rng::uniform01(eng);
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool a_front = rank[a] == 0;
        const bool b_front = rank[b] == 0;
        if (a_front != b_front) return a_front;
        if (uncertainty[a] != uncertainty[b]) return uncertainty[a] > uncertainty[b];
        return tiebreak[a] < tiebreak[b];
    });
    order.resize(u);
    return order;
}

}  // namespace latmoo::surrogate
