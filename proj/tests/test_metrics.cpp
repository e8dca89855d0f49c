#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "latmoo/metrics.hpp"
#include "latmoo/rng.hpp"
#include "oracles.hpp"

using namespace latmoo;
using metrics::Front;

namespace {

Front random_front(int n, rng::Engine& eng) {
    Front f(static_cast<std::size_t>(n));
    for (auto& p : f) p = {rng::uniform01(eng), rng::uniform01(eng)};
    return f;
}

}  // namespace

TEST_CASE("unit boxes by hand") {
    CHECK(metrics::hypervolume_2d({{0.0, 0.0}}, {1.0, 1.0}).area == doctest::Approx(1.0));
    CHECK(metrics::hypervolume_2d({{0.5, 0.5}}, {1.0, 1.0}).area == doctest::Approx(0.25));
    CHECK(metrics::hypervolume_2d({{0.2, 0.6}, {0.6, 0.2}}, {1.0, 1.0}).area ==
          doctest::Approx(0.48));
}

TEST_CASE("points outside the reference are discarded with a count") {
    const auto result = metrics::hypervolume_2d({{0.5, 0.5}, {1.5, 0.1}}, {1.0, 1.0});
    CHECK(result.area == doctest::Approx(0.25));
    CHECK(result.discarded == 1);
    CHECK_THROWS_AS(metrics::hypervolume_2d({{2.0, 2.0}}, {1.0, 1.0}), metrics::EmptyFront);
}

TEST_CASE("sweep agrees with a monte-carlo coverage oracle") {
    rng::Engine eng(333);
    const std::vector<double> reference{1.0, 1.0};
    for (int trial = 0; trial < 50; ++trial) {
        const auto front = random_front(1 + static_cast<int>(rng::index_below(eng, 12)), eng);
        const double exact = metrics::hypervolume_2d(front, reference).area;
        const double mc = oracles::mc_hypervolume_2d(front, reference, 1000000,
                                                     4242 + static_cast<std::uint64_t>(trial));
        CHECK(std::abs(exact - mc) <= 1e-3);
    }
}

TEST_CASE("hypervolume is monotone and ignores dominated points") {
    rng::Engine eng(11);
    const std::vector<double> reference{1.0, 1.0};
    for (int trial = 0; trial < 200; ++trial) {
        auto front = random_front(6, eng);
        const double base = metrics::hypervolume_2d(front, reference).area;

        // Adding any point never decreases the area.
        auto grown = front;
        grown.push_back({rng::uniform01(eng), rng::uniform01(eng)});
        CHECK(metrics::hypervolume_2d(grown, reference).area >= base - 1e-12);

        // Removing a dominated point changes nothing.
        for (std::size_t i = 0; i < front.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < front.size(); ++j)
                if (i != j && oracles::dominates(front[j], front[i])) dominated = true;
            if (!dominated) continue;
            auto pruned = front;
            pruned.erase(pruned.begin() + static_cast<std::ptrdiff_t>(i));
            CHECK(metrics::hypervolume_2d(pruned, reference).area ==
                  doctest::Approx(base).epsilon(1e-12));
            break;
        }
    }
}

TEST_CASE("igd basics and brute-force equivalence") {
    CHECK(metrics::igd({{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 0.0}, {1.0, 1.0}}) ==
          doctest::Approx(0.0));
    CHECK(metrics::igd({{3.0, 4.0}}, {{0.0, 0.0}}) == doctest::Approx(5.0));
    CHECK_THROWS_AS(metrics::igd({}, {{0.0, 0.0}}), metrics::EmptySet);

    rng::Engine eng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const auto front = random_front(10, eng);
        const auto reference = random_front(10, eng);
        CHECK(metrics::igd(front, reference) ==
              doctest::Approx(oracles::brute_igd(front, reference)).epsilon(1e-12));
    }
}

TEST_CASE("igd is zero only when every reference point is covered") {
    rng::Engine eng(19);
    const auto front = random_front(5, eng);
    CHECK(metrics::igd(front, front) == doctest::Approx(0.0));
    auto reference = front;
    reference.push_back({front[0][0] + 0.125, front[0][1]});
    CHECK(metrics::igd(front, reference) > 0.0);
}

TEST_CASE("a single run's attainment boundary is its own staircase") {
    const Front front{{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}, {0.6, 0.6}};  // last dominated
    const auto boundary = metrics::attainment_summary({front}, 0.5);
    const Front expected{{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}};
    CHECK(boundary == expected);
    const auto twice = metrics::attainment_summary({front, front}, 0.5);
    CHECK(twice == expected);
}

TEST_CASE("attainment boundary matches the grid oracle") {
    rng::Engine eng(404);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Front> fronts;
        for (int r = 0; r < 3; ++r)
            fronts.push_back(random_front(1 + static_cast<int>(rng::index_below(eng, 6)), eng));
        const double level = 0.5;
        const auto boundary = metrics::attainment_summary(fronts, level);
        const auto needed = static_cast<std::size_t>(
            std::ceil(level * static_cast<double>(fronts.size())));

        // Grid oracle: for every observed coordinate pair, attainment at the
        // boundary must flip exactly along the returned staircase.
        std::vector<double> xs, ys;
        for (const auto& f : fronts)
            for (const auto& p : f) {
                xs.push_back(p[0]);
                ys.push_back(p[1]);
            }
        for (const double x : xs) {
            for (const double y : ys) {
                const bool attained = oracles::attainment_count(fronts, x, y) >= needed;
                // Staircase prediction: attained iff some vertex weakly
                // dominates (x, y).
                bool predicted = false;
                for (const auto& v : boundary)
                    if (v[0] <= x && v[1] <= y) predicted = true;
                CHECK(attained == predicted);
            }
        }
        // Monotone staircase shape.
        for (std::size_t i = 1; i < boundary.size(); ++i) {
            CHECK(boundary[i][0] > boundary[i - 1][0]);
            CHECK(boundary[i][1] < boundary[i - 1][1]);
        }
    }
}

TEST_CASE("attainment input validation") {
    CHECK_THROWS_AS(metrics::attainment_summary({}, 0.5), metrics::EmptySet);
    CHECK_THROWS_AS(metrics::attainment_summary({{{0.1, 0.2, 0.3}}}, 0.5),
                    metrics::DimensionUnsupported);
}

TEST_CASE("nondominated_subset strips dominated and duplicate points") {
    const Front front{{0.5, 0.5}, {0.5, 0.5}, {0.2, 0.8}, {0.6, 0.6}};
    const auto sub = metrics::nondominated_subset(front);
    CHECK(sub == Front{{0.5, 0.5}, {0.2, 0.8}});
}
