#include "oracles.hpp"
#include "scenetok/error.hpp"
#include "scenetok/geometry.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <random>

using namespace scenetok;

namespace {

CameraView identity_camera(Intrinsics k = {1, 1, 0, 0}, Vec3 t = Vec3::Zero()) {
    return {0, k, Mat3::Identity(), t};
}

DepthMap constant_depth(int h, int w, double d) {
    return {h, w, std::vector<double>(static_cast<std::size_t>(h) * w, d)};
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("camera rejects bad intrinsics and non-orthonormal rotation") {
    CHECK_THROWS_AS(CameraView(0, {0, 1, 0, 0}, Mat3::Identity(), Vec3::Zero()), InputError);
    CHECK_THROWS_AS(CameraView(0, {1, -1, 0, 0}, Mat3::Identity(), Vec3::Zero()), InputError);
    Mat3 skew = Mat3::Identity();
    skew(0, 1) = 0.01;
    CHECK_THROWS_AS(CameraView(0, {1, 1, 0, 0}, skew, Vec3::Zero()), InputError);
}

TEST_CASE("unproject: identity camera, pixel (0,0), depth 2 -> (0,0,2)") {
    auto depth = constant_depth(1, 1, 2.0);
    const auto grid = unproject_depth(depth, identity_camera(), 1, 1, 1);
    REQUIRE(grid.valid({0, 0, 0}));
    CHECK(grid.coord({0, 0, 0}).isApprox(Vec3(0, 0, 2)));
}

TEST_CASE("unproject: zero, negative and non-finite depth mark the patch invalid") {
    DepthMap depth{1, 4, {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(), 1.0}};
    const auto grid = unproject_depth(depth, identity_camera(), 1, 1, 4);
    CHECK_FALSE(grid.valid({0, 0, 0}));
    CHECK_FALSE(grid.valid({0, 0, 1}));
    CHECK_FALSE(grid.valid({0, 0, 2}));
    CHECK(grid.valid({0, 0, 3}));
    CHECK(grid.valid_count() == 1);
}

TEST_CASE("unproject: translated camera, pixel (3,1), depth 4 -> world (5,0,4)") {
    // Pixel x = 3 (column), y = 1 (row). Camera point (4,0,4), world (5,0,4).
    DepthMap depth = constant_depth(2, 4, 0.0);
    depth.values[1 * 4 + 3] = 4.0;
    const auto cam = identity_camera({2, 2, 1, 1}, Vec3(1, 0, 0));
    const auto grid = unproject_depth(depth, cam, 1, 2, 4);
    REQUIRE(grid.valid({0, 1, 3}));
    CHECK(grid.coord({0, 1, 3}).isApprox(Vec3(5, 0, 4)));
    const auto back = project(cam, grid.coord({0, 1, 3}));
    CHECK(back.x == doctest::Approx(3.0));
    CHECK(back.y == doctest::Approx(1.0));
    CHECK(back.depth == doctest::Approx(4.0));
}

TEST_CASE("unproject: patch coordinate sits at the center pixel of the stride window") {
    DepthMap depth = constant_depth(4, 6, 0.0);
    // stride 2: patch (1, 2) is anchored at pixel row 3, column 5.
    depth.values[3 * 6 + 5] = 1.0;
    const auto grid = unproject_depth(depth, identity_camera(), 2, 2, 3);
    CHECK(grid.valid_count() == 1);
    REQUIRE(grid.valid({0, 1, 2}));
    CHECK(grid.coord({0, 1, 2}).isApprox(Vec3(5, 3, 1)));
}

TEST_CASE("unproject: depth size must match the declared grid") {
    const auto depth = constant_depth(3, 3, 1.0);
    CHECK_THROWS_AS(unproject_depth(depth, identity_camera(), 1, 2, 3), InputError);
    CHECK_THROWS_AS(unproject_depth(depth, identity_camera(), 2, 1, 1), InputError);
    CHECK_THROWS_AS(unproject_depth(depth, identity_camera(), 0, 3, 3), InputError);
}

TEST_CASE("unproject round-trip on random cameras") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> d(0.3, 8.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Quaterniond q = Eigen::Quaterniond(u(rng), u(rng), u(rng), u(rng)).normalized();
        const CameraView cam(0, {d(rng) * 50, d(rng) * 50, 7.5, 5.5}, q.toRotationMatrix(), Vec3(u(rng), u(rng), u(rng)) * 5);
        DepthMap depth{12, 16, {}};
        for (int i = 0; i < 12 * 16; ++i) depth.values.push_back(d(rng));
        const auto grid = unproject_depth(depth, cam, 2, 6, 8);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto a = grid.address(i);
            const auto p = project(cam, grid.coord(i));
            CHECK(std::abs(p.x - (a.col * 2 + 1)) < 1e-4);
            CHECK(std::abs(p.y - (a.row * 2 + 1)) < 1e-4);
            CHECK(std::abs(p.depth - depth.at(a.row * 2 + 1, a.col * 2 + 1)) < 1e-6);
        }
    }
}

TEST_CASE("flatten_grid ordering and view partition") {
    const CameraView v0(0, {1, 1, 0, 0}, Mat3::Identity(), Vec3(1, 2, 3));
    const CameraView v1(1, {1, 1, 0, 0}, Mat3::Identity(), Vec3(-1, 0, 0));
    const std::vector<CameraView> views{v0, v1};

    SUBCASE("all invalid -> empty cloud") {
        PatchGrid g(1, 2, 2);
        CHECK(flatten_grid(g, views).empty());
    }
    SUBCASE("one view, 2x2 valid -> k-major, row, col order") {
        const auto g = unproject_depth(constant_depth(2, 2, 1.0), v0, 1, 2, 2);
        const auto c = flatten_grid(g, views);
        REQUIRE(c.size() == 4);
        const std::vector<PatchAddress> expected{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}};
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(*c.source_patch()[i] == expected[i]);
            CHECK(c.view_origins()[i] == v0.translation());
        }
    }
    SUBCASE("second view fully invalid -> only view 0 points") {
        std::mt19937_64 rng(3);
        DepthMap d0 = constant_depth(3, 3, 1.0);
        for (auto& x : d0.values) x = (rng() % 3 == 0) ? 0.0 : 2.0;
        const std::vector<PatchGrid> slices{unproject_depth(d0, v0, 1, 3, 3),
                                            unproject_depth(constant_depth(3, 3, 0.0), v1, 1, 3, 3)};
        const auto g = PatchGrid::stack(slices);
        std::size_t brute = 0;
        for (double x : d0.values) brute += x > 0 ? 1 : 0;
        const auto c = flatten_grid(g, views);
        CHECK(c.size() == brute);
        for (int id : c.view_ids()) CHECK(id == 0);
    }
    SUBCASE("view table shorter than V is an input error") {
        PatchGrid g(3, 1, 1);
        CHECK_THROWS_AS(flatten_grid(g, views), InputError);
    }
}

TEST_CASE("flatten_grid partitions indices by view") {
    std::mt19937_64 rng(5);
    std::vector<CameraView> views;
    std::vector<PatchGrid> slices;
    for (int k = 0; k < 4; ++k) {
        views.emplace_back(k, Intrinsics{2, 2, 1, 1}, Mat3::Identity(), Vec3(k, 0, 0));
        DepthMap d = constant_depth(4, 5, 0.0);
        for (auto& x : d.values) x = (rng() % 4 == 0) ? 0.0 : 1.0 + static_cast<double>(rng() % 100) / 10.0;
        slices.push_back(unproject_depth(d, views.back(), 1, 4, 5));
    }
    const auto g = PatchGrid::stack(slices);
    const auto c = flatten_grid(g, views);
    std::vector<std::size_t> per_view(4, 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        per_view[c.view_ids()[i]]++;
        CHECK(c.source_patch()[i]->view == c.view_ids()[i]);
        CHECK(c.view_origins()[i] == views[c.view_ids()[i]].translation());
    }
    for (int k = 0; k < 4; ++k) CHECK(per_view[k] == g.valid_count(k));
}

TEST_CASE("lift_6d values") {
    const std::vector<CameraView> views{CameraView(0, {1, 1, 0, 0}, Mat3::Identity(), Vec3(9, 9, 9)),
                                        CameraView(1, {1, 1, 0, 0}, Mat3::Identity(), Vec3(10, 0, 0)),
                                        CameraView(2, {1, 1, 0, 0}, Mat3::Identity(), Vec3(0, 0, 0))};
    SUBCASE("w = 0 drops the view part") {
        const ViewedPointCloud c({Vec3(1, 2, 3)}, {0}, views);
        const auto l = lift_6d(c, 0.0);
        const std::vector<double> expected{1, 2, 3, 0, 0, 0};
        CHECK(l.data() == expected);
    }
    SUBCASE("w = 0.5, p = 0, t = (10,0,0) -> (0,0,0,sqrt(50),0,0)") {
        const ViewedPointCloud c({Vec3(0, 0, 0)}, {1}, views);
        const auto l = lift_6d(c, 0.5);
        CHECK(l.row(0)[3] == doctest::Approx(std::sqrt(50.0)).epsilon(1e-15));
        CHECK(l.row(0)[0] == 0.0);
        CHECK(l.row(0)[4] == 0.0);
    }
    SUBCASE("zero point and origin -> zero vector for any w") {
        const ViewedPointCloud c({Vec3(0, 0, 0)}, {2}, views);
        for (double w : {0.0, 0.25, 0.5, 0.99}) {
            const auto l = lift_6d(c, w);
            for (double x : l.data()) CHECK(x == 0.0);
        }
    }
    SUBCASE("w outside [0,1) is rejected") {
        const ViewedPointCloud c({Vec3(0, 0, 0)}, {2}, views);
        CHECK_THROWS_AS(lift_6d(c, 1.0), InputError);
        CHECK_THROWS_AS(lift_6d(c, -0.1), InputError);
        CHECK_THROWS_AS(lift_6d(c, std::nan("")), InputError);
    }
    SUBCASE("Point6D agrees with lift_6d") {
        const Point6D p{Vec3(1, -2, 0.5), Vec3(3, 4, 5), 0.3};
        const ViewedPointCloud c({p.spatial}, {0}, {p.view}, {std::nullopt});
        const auto l = lift_6d(c, 0.3);
        const auto v = p.lifted();
        for (int i = 0; i < 6; ++i) CHECK(l.row(0)[i] == v[i]);
    }
}

TEST_CASE("6D squared distance splits into spatial and view parts") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto cloud = oracle::random_cloud(rng, 60, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const double w = u(rng) * 0.999;
        const auto l = lift_6d(cloud, w);
        for (std::size_t i = 0; i < cloud.size(); i += 7) {
            for (std::size_t j = 0; j < cloud.size(); j += 5) {
                const double direct = squared_distance(l.row(i), l.row(j));
                const double split = (1 - w) * (cloud.positions()[i] - cloud.positions()[j]).squaredNorm() +
                                     w * (cloud.view_origins()[i] - cloud.view_origins()[j]).squaredNorm();
                CHECK(std::abs(direct - split) <= 1e-9 * std::max(1.0, split));
            }
        }
    }
}

TEST_CASE("point cloud invariants") {
    CHECK_THROWS_AS(ViewedPointCloud({Vec3::Zero()}, {0, 1}, {Vec3::Zero()}, {std::nullopt}), InputError);
    const std::vector<CameraView> views{CameraView(0, {1, 1, 0, 0}, Mat3::Identity(), Vec3(1, 1, 1))};
    CHECK_THROWS_AS(ViewedPointCloud({Vec3::Zero()}, {3}, views), InputError);
    const ViewedPointCloud c({Vec3(1, 0, 0), Vec3(2, 0, 0)}, {0, 0}, views);
    const std::vector<std::size_t> idx{1};
    const auto s = c.subset(idx);
    REQUIRE(s.size() == 1);
    CHECK(s.positions()[0] == Vec3(2, 0, 0));
}

}  // TEST_SUITE
