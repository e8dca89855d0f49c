#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "latmoo/surrogate.hpp"
#include "oracles.hpp"

using namespace latmoo;
using surrogate::RbfModel;
using surrogate::Sample;

TEST_CASE("degenerate training sets are rejected") {
    CHECK_THROWS_AS(RbfModel::fit({{{0.5}, 1.0}}), surrogate::DegenerateSet);
    CHECK_THROWS_AS(RbfModel::fit({{{0.5}, 1.0}, {{0.5}, 2.0}, {{0.5}, 3.0}}),
                    surrogate::DegenerateSet);
}

TEST_CASE("the interpolant reproduces its training targets") {
    const auto model = RbfModel::fit({{{0.0}, 0.0}, {{1.0}, 1.0}});
    CHECK(std::abs(model.predict({0.0}).mean - 0.0) <= 1e-6);
    CHECK(std::abs(model.predict({1.0}).mean - 1.0) <= 1e-6);
    CHECK(model.predict({0.0}).uncertainty == 0.0);
    CHECK(model.predict({1.0}).uncertainty == 0.0);
    CHECK(model.predict({0.5}).uncertainty > 0.0);
}

TEST_CASE("interpolation holds on random well-separated sets") {
    rng::Engine eng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Sample> samples;
        while (samples.size() < 12) {
            std::vector<double> x{rng::uniform01(eng), rng::uniform01(eng)};
            bool close = false;
            for (const auto& [sx, sy] : samples) {
                const double d = std::hypot(sx[0] - x[0], sx[1] - x[1]);
                if (d < 0.05) close = true;
            }
            if (close) continue;
            samples.emplace_back(x, std::sin(7.0 * x[0]) + x[1] * x[1]);
        }
        const auto model = RbfModel::fit(samples);
        for (const auto& [x, y] : samples) {
            CHECK(std::abs(model.predict(x).mean - y) <= 1e-6);
            CHECK(model.predict(x).uncertainty == 0.0);
        }
    }
}

TEST_CASE("duplicate inputs merge by mean target") {
    const auto model =
        RbfModel::fit({{{0.0}, 1.0}, {{0.0}, 3.0}, {{1.0}, 5.0}});
    CHECK(std::abs(model.predict({0.0}).mean - 2.0) <= 1e-6);
    CHECK(model.training_size() == 2);
}

TEST_CASE("a fitted quadratic beats the constant-mean baseline") {
    rng::Engine eng(7);
    std::vector<Sample> train;
    const auto f = [](double x) { return (x - 0.3) * (x - 0.3); };
    for (int i = 0; i < 20; ++i) {
        const double x = rng::uniform01(eng);
        train.push_back({{x}, f(x)});
    }
    double mean = 0.0;
    for (const auto& [x, y] : train) mean += y;
    mean /= static_cast<double>(train.size());
    const auto model = RbfModel::fit(train);
    double rmse_model = 0.0, rmse_baseline = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double x = rng::uniform01(eng);
        const double err = model.predict({x}).mean - f(x);
        rmse_model += err * err;
        rmse_baseline += (mean - f(x)) * (mean - f(x));
    }
    CHECK(std::sqrt(rmse_model / 50.0) < std::sqrt(rmse_baseline / 50.0));
}

TEST_CASE("uncertainty grows with distance and is isotropic") {
    const auto model = RbfModel::fit({{{0.0, 0.0}, 0.0}, {{1.0, 0.0}, 1.0}});
    const auto near = model.predict({0.1, 0.0});
    const auto far = model.predict({3.0, 3.0});
    CHECK(far.uncertainty > near.uncertainty);
    // Two queries equidistant from the same nearest training point.
    const auto left = model.predict({-0.2, 0.0});
    const auto up = model.predict({0.0, 0.2});
    CHECK(left.uncertainty == doctest::Approx(up.uncertainty).epsilon(1e-12));
    CHECK_THROWS_AS(model.predict({0.0}), surrogate::DimensionMismatch);
}

TEST_CASE("latin hypercube designs stratify every dimension") {
    rng::Engine eng(11);
    const std::vector<double> lower{0.0, 0.0};
    const std::vector<double> upper{1.0, 1.0};

    const auto single = surrogate::lhs_sample({{0.5, 0.5}}, 1, 0.2, lower, upper, eng);
    REQUIRE(single.size() == 1);
    CHECK(single[0][0] >= 0.4);
    CHECK(single[0][0] <= 0.6);

    const int k = 8;
    const auto design = surrogate::lhs_sample({{0.5, 0.5}}, k, 1.0, lower, upper, eng);
    REQUIRE(design.size() == static_cast<std::size_t>(k));
    for (int dim = 0; dim < 2; ++dim) {
        std::vector<int> seen(k, 0);
        for (const auto& p : design) {
            const int stratum = std::min(k - 1, static_cast<int>(p[static_cast<std::size_t>(dim)] * k));
            ++seen[static_cast<std::size_t>(stratum)];
        }
        for (const int c : seen) CHECK(c == 1);
    }
}

TEST_CASE("lhs marginals are uniform per stratum") {
    // 10^4 designs of 4 points in 1-D: each stratum receives exactly one
    // point per design, and the within-stratum positions are uniform.
    rng::Engine eng(13);
    const int k = 4;
    const int designs = 10000;
    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    for (int d = 0; d < designs; ++d) {
        const auto pts = surrogate::lhs_sample({{0.5}}, k, 1.0, {0.0}, {1.0}, eng);
        for (const auto& p : pts) {
            const int stratum = std::min(k - 1, static_cast<int>(p[0] * k));
            sums[static_cast<std::size_t>(stratum)] += p[0] * k - stratum;
        }
    }
    // Within-stratum offset ~ U(0,1): mean 0.5, sigma of the mean over
    // `designs` draws is 1/sqrt(12 * designs).
    const double sigma = 1.0 / std::sqrt(12.0 * designs);
    for (const double s : sums)
        CHECK(std::abs(s / designs - 0.5) <= 3.0 * sigma);
}

TEST_CASE("boxes are clipped to the domain") {
    rng::Engine eng(3);
    const auto pts = surrogate::lhs_sample({{0.0, 1.0}}, 6, 0.5, {0.0, 0.0}, {1.0, 1.0}, eng);
    for (const auto& p : pts) {
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 0.25);
        CHECK(p[1] >= 0.75);
        CHECK(p[1] <= 1.0);
    }
}

TEST_CASE("acquisition prefers nondominated, uncertain candidates") {
    // Two anchors per objective give predictable means; the pool is graded.
    const auto m0 = RbfModel::fit({{{0.0, 0.0}, 0.0}, {{1.0, 1.0}, 1.0}});
    const auto m1 = RbfModel::fit({{{0.0, 0.0}, 1.0}, {{1.0, 1.0}, 0.0}});
    std::vector<RbfModel> models{m0, m1};

    rng::Engine eng(17);
    std::vector<std::vector<double>> candidates;
    for (int i = 0; i < 10; ++i)
        candidates.push_back({rng::uniform01(eng), rng::uniform01(eng)});

    const auto everyone = surrogate::acquire(models, candidates, candidates.size(), eng);
    CHECK(everyone.size() == candidates.size());

    // Exhaustive oracle: nondominated under means first, then by descending
    // summed uncertainty.
    std::vector<std::vector<double>> means;
    std::vector<double> unc;
    for (const auto& c : candidates) {
        const auto p0 = m0.predict(c);
        const auto p1 = m1.predict(c);
        means.push_back({p0.mean, p1.mean});
        unc.push_back(p0.uncertainty + p1.uncertainty);
    }
    const auto front = oracles::nondominated_set(means);
    const auto in_front = [&](std::size_t i) {
        return std::find(front.begin(), front.end(), i) != front.end();
    };
    rng::Engine eng2(17);
    const auto picked = surrogate::acquire(models, candidates, 3, eng2);
    REQUIRE(picked.size() == 3);
    for (std::size_t rank = 1; rank < picked.size(); ++rank) {
        const auto prev = picked[rank - 1];
        const auto cur = picked[rank];
        const bool order_ok =
            (in_front(prev) && !in_front(cur)) ||
            (in_front(prev) == in_front(cur) && unc[prev] >= unc[cur]);
        CHECK(order_ok);
    }
    CHECK_THROWS_AS(surrogate::acquire(models, candidates, 11, eng),
                    surrogate::TooFewCandidates);
}

TEST_CASE("a dominating, uniquely uncertain candidate is picked first") {
    const auto m0 = RbfModel::fit({{{0.0}, 0.0}, {{1.0}, 1.0}});
    const auto m1 = RbfModel::fit({{{0.0}, 0.0}, {{1.0}, 1.0}});
    std::vector<RbfModel> models{m0, m1};
    // Candidate 0 sits far from training data (high uncertainty, low mean is
    // not needed since it dominates); the rest are training points.
    std::vector<std::vector<double>> candidates{{-2.0}, {0.0}, {1.0}};
    rng::Engine eng(23);
    const auto picked = surrogate::acquire(models, candidates, 1, eng);
    REQUIRE(picked.size() == 1);
    CHECK(picked[0] == 0);
}
