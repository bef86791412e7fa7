#include "oracles.hpp"
#include "scenetok/error.hpp"
#include "scenetok/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace scenetok;

namespace {

ViewedPointCloud cloud_of(std::vector<Vec3> pos, std::vector<int> views) {
    const auto n = pos.size();
    return {std::move(pos), std::move(views), std::vector<Vec3>(n, Vec3::Zero()),
            std::vector<std::optional<PatchAddress>>(n)};
}

ViewedPointCloud transformed(const ViewedPointCloud& c, double scale, const Vec3& shift) {
    std::vector<Vec3> pos;
    for (const auto& p : c.positions()) pos.push_back(p * scale + shift);
    return {pos, c.view_ids(), c.view_origins(), c.source_patch()};
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("points_per_view_std on constructed counts") {
    CHECK(points_per_view_std(cloud_of({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)}, {0, 0, 0, 0}), 2) ==
          2.0);
    CHECK(points_per_view_std(cloud_of({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)}, {0, 1, 2, 3}), 4) ==
          0.0);
    CHECK(points_per_view_std(cloud_of({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {0, 0}), 1) == 0.0);
    // counts (3, 1, 0, 0): mean 1, squared deviations 4, 0, 1, 1 -> sqrt(1.5)
    const auto c = cloud_of({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)}, {0, 0, 1, 0});
    CHECK(points_per_view_std(c, 4) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
    CHECK_THROWS_AS(points_per_view_std(ViewedPointCloud{}, 2), InputError);
    CHECK_THROWS_AS(points_per_view_std(c, 1), InputError);
}

TEST_CASE("views_per_neighborhood examples") {
    std::vector<Vec3> line;
    for (int i = 0; i < 10; ++i) line.emplace_back(i, 0, 0);
    SUBCASE("single view") {
        const auto r = views_per_neighborhood(cloud_of(line, std::vector<int>(10, 0)), 4);
        for (auto c : r.counts) CHECK(c == 1);
        CHECK(r.mean == 1.0);
    }
    SUBCASE("alternating views on a line, k = 2") {
        std::vector<int> views;
        for (int i = 0; i < 10; ++i) views.push_back(i % 2);
        const auto c = cloud_of(line, views);
        const auto r = views_per_neighborhood(c, 2);
        CHECK(r.counts == oracle::views_per_neighborhood(c, 2));
        // Interior neighbors are i-1 and i+1, both of the other view.
        for (int i = 1; i < 9; ++i) CHECK(r.counts[i] == 1);
        // Endpoint 0 reaches 1 and 2: two views.
        CHECK(r.counts[0] == 2);
        CHECK(r.counts[9] == 2);
    }
    SUBCASE("k = 1") {
        std::vector<int> views{0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
        for (auto c : views_per_neighborhood(cloud_of(line, views), 1).counts) CHECK(c == 1);
    }
    SUBCASE("N <= k is rejected") {
        CHECK_THROWS_AS(views_per_neighborhood(cloud_of(line, std::vector<int>(10, 0)), 10), InputError);
        CHECK_THROWS_AS(views_per_neighborhood(cloud_of(line, std::vector<int>(10, 0)), 0), InputError);
    }
}

TEST_CASE("nn_distance examples") {
    std::vector<Vec3> grid;
    for (int i = 0; i < 8; ++i) grid.emplace_back(0.25 * i, 0, 0);
    const auto r = nn_distance(cloud_of(grid, std::vector<int>(8, 0)));
    for (double d : r.distances) CHECK(d == 0.25);
    CHECK(r.mean == 0.25);
    CHECK(r.std == 0.0);

    const auto pair = nn_distance(cloud_of({Vec3(0, 0, 0), Vec3(0, 3, 0)}, {0, 1}));
    CHECK(pair.distances == std::vector<double>{3.0, 3.0});
    CHECK_THROWS_AS(nn_distance(cloud_of({Vec3(0, 0, 0)}, {0})), InputError);
}

TEST_CASE("statistics equal brute force") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 8; ++trial) {
        auto c = oracle::random_cloud(rng, 100 + rng() % 600, 1 + static_cast<int>(rng() % 6));
        if (trial % 2 == 0) {
            std::vector<Vec3> snapped;
            for (const auto& p : c.positions()) snapped.push_back(p.array().round());
            c = ViewedPointCloud(snapped, c.view_ids(), c.view_origins(), c.source_patch());
        }
        const auto vpn = views_per_neighborhood(c, 32);
        CHECK(vpn.counts == oracle::views_per_neighborhood(c, 32));
        const auto nn = nn_distance(c);
        CHECK(nn.distances == oracle::nn_distance(c.positions()));
    }
}

TEST_CASE("translation and scale behavior") {
    std::mt19937_64 rng(9);
    const auto c = oracle::random_cloud(rng, 400, 5);
    const auto base = compute_stats(c, 5, 16);
    const auto moved = compute_stats(transformed(c, 1.0, Vec3(0.5, -1.25, 3.0)), 5, 16);
    CHECK(moved.points_per_view_std == base.points_per_view_std);
    CHECK(moved.views_per_neighborhood_mean == base.views_per_neighborhood_mean);
    CHECK(moved.nn_distance_mean == doctest::Approx(base.nn_distance_mean).epsilon(1e-12));
    CHECK(moved.nn_distance_std == doctest::Approx(base.nn_distance_std).epsilon(1e-9));
    const auto big = compute_stats(transformed(c, 4.0, Vec3::Zero()), 5, 16);
    CHECK(big.nn_distance_mean == doctest::Approx(4.0 * base.nn_distance_mean).epsilon(1e-12));
    CHECK(big.views_per_neighborhood_mean == base.views_per_neighborhood_mean);
    CHECK(base.views_per_neighborhood_mean >= 1.0);
    CHECK(base.views_per_neighborhood_mean <= 5.0);
    CHECK(base.points == 400);
    CHECK(base.views == 5);
    CHECK(base.k == 16);
}

TEST_CASE("mean_and_population_std") {
    const auto r = mean_and_population_std({100.0, 102.0});
    CHECK(r.mean == 101.0);
    CHECK(r.std == 1.0);
    CHECK_THROWS_AS(mean_and_population_std({}), InputError);
}

}  // TEST_SUITE
