#include "scenetok/error.hpp"
#include "scenetok/io.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

using namespace scenetok;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("scenetok_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

io::SceneManifest small_manifest() {
    io::SceneManifest m;
    m.grid_height = 2;
    m.grid_width = 3;
    m.stride = 1;
    io::ViewRecord v;
    v.index = 0;
    v.intrinsics = {1, 1, 0, 0};
    v.depth = "depth_000.stk";
    m.views.push_back(v);
    m.boxes.push_back({{1.5, -0.5, 0.5}, {2.5, 1.5, 1.5}, "shelf"});
    return m;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("STK1 layout is pinned little endian") {
    const io::Blob b{1, 2, {1.0f, -2.0f}};
    const auto bytes = io::encode_blob(b);
    REQUIRE(bytes.size() == 12 + 8);
    CHECK(bytes.substr(0, 4) == "STK1");
    const unsigned char header[8] = {1, 0, 0, 0, 2, 0, 0, 0};
    CHECK(std::memcmp(bytes.data() + 4, header, 8) == 0);
    // 1.0f = 0x3f800000, stored low byte first.
    const unsigned char one[4] = {0x00, 0x00, 0x80, 0x3f};
    CHECK(std::memcmp(bytes.data() + 12, one, 4) == 0);
    CHECK(io::decode_blob(bytes) == b);
}

TEST_CASE("STK1 rejects malformed input") {
    const auto good = io::encode_blob({2, 1, {1.0f, 2.0f}});
    CHECK_THROWS_AS(io::decode_blob(good.substr(0, 10)), InputError);
    CHECK_THROWS_AS(io::decode_blob(good.substr(0, good.size() - 1)), InputError);
    CHECK_THROWS_AS(io::decode_blob(good + "x"), InputError);
    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_AS(io::decode_blob(bad), InputError);
    CHECK_THROWS_AS(io::encode_blob({2, 2, {1.0f}}), InputError);
    CHECK_THROWS_AS(io::read_blob("/nonexistent/blob.stk"), InputError);
}

TEST_CASE("blob, feature and depth round trips") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> u(-100, 100);
    io::Blob b{17, 5, {}};
    for (int i = 0; i < 85; ++i) b.values.push_back(u(rng));
    const auto dir = scratch("blob");
    io::write_blob(dir / "b.stk", b);
    CHECK(io::read_blob(dir / "b.stk") == b);
    CHECK(fs::file_size(dir / "b.stk") == 12 + 4 * 85);

    const auto f = io::to_features(b, Anchor::per_patch);
    CHECK(f.count() == 17);
    CHECK(io::to_blob(f) == b);

    const io::Blob depth{6, 1, {1, 2, 3, 4, 5, 6}};
    const auto d = io::to_depth(depth, 2, 3);
    CHECK(d.at(1, 0) == 4.0);
    CHECK(io::to_blob(d) == depth);
    CHECK_THROWS_AS(io::to_depth(depth, 3, 3), InputError);
    CHECK_THROWS_AS(io::to_depth(b, 17, 1), InputError);
}

TEST_CASE("manifest round trip and validation") {
    auto m = small_manifest();
    m.views[0].rotation = {0, -1, 0, 1, 0, 0, 0, 0, 1};
    m.views[0].translation = {0.1, 0.2, 0.30000000000000004};
    m.f_im = "f_im.stk";
    m.scene_points = "pts.stk";
    CHECK(io::parse_manifest(io::dump_manifest(m)) == m);
    const auto dir = scratch("manifest");
    io::write_manifest(dir / "scene.json", m);
    CHECK(io::read_manifest(dir / "scene.json") == m);

    CHECK_THROWS_AS(io::parse_manifest("{"), InputError);
    CHECK_THROWS_AS(io::parse_manifest("[]"), InputError);
    CHECK_THROWS_AS(io::parse_manifest(R"({"kind":"scene"})"), InputError);
    auto bad = m;
    bad.views[0].index = 1;
    CHECK_THROWS_AS(io::parse_manifest(io::dump_manifest(bad)), InputError);
    bad = m;
    bad.stride = 0;
    CHECK_THROWS_AS(io::parse_manifest(io::dump_manifest(bad)), InputError);
    bad = m;
    bad.views[0].rotation = {2, 0, 0, 0, 1, 0, 0, 0, 1};
    CHECK_THROWS_AS(io::to_camera(bad.views[0]), InputError);
}

TEST_CASE("bundled scenes load") {
    const auto tiny = io::load_scene(SCENETOK_DATA_DIR "/tiny3/scene.json");
    REQUIRE(tiny.cloud.size() == 3);
    CHECK(tiny.cloud.positions()[1] == Vec3(2, 0, 2));
    CHECK(tiny.cloud.positions()[2] == Vec3(8, 0, 4));

    const auto six = io::load_scene(SCENETOK_DATA_DIR "/six_tokens/scene.json");
    CHECK(six.cloud.size() == 6);
    const auto boxes = io::read_boxes(SCENETOK_DATA_DIR "/six_tokens/boxes.json");
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].contains(six.cloud.positions()[2]));
    CHECK(boxes[0].contains(six.cloud.positions()[5]));
    CHECK_FALSE(boxes[0].contains(six.cloud.positions()[4]));
}

TEST_CASE("scene loading checks referenced files") {
    const auto dir = scratch("scene");
    auto m = small_manifest();
    io::write_manifest(dir / "scene.json", m);
    CHECK_THROWS_AS(io::load_scene(dir / "scene.json"), InputError);  // depth missing
    io::write_blob(dir / "depth_000.stk", {4, 1, {1, 1, 1, 1}});
    CHECK_THROWS_AS(io::load_scene(dir / "scene.json"), InputError);  // wrong size
    io::write_blob(dir / "depth_000.stk", {6, 1, {1, 1, 1, 0, 1, 1}});
    m.f_im = "f_im.stk";
    io::write_manifest(dir / "scene.json", m);
    io::write_blob(dir / "f_im.stk", {5, 2, std::vector<float>(10, 0.0f)});
    CHECK_THROWS_AS(io::load_scene(dir / "scene.json"), InputError);  // 5 rows for 6 patches
    io::write_blob(dir / "f_im.stk", {6, 2, std::vector<float>(12, 0.5f)});
    const auto s = io::load_scene(dir / "scene.json");
    CHECK(s.cloud.size() == 5);
    CHECK(s.f_im->count() == 6);
    CHECK(s.boxes.size() == 1);
    CHECK_FALSE(s.token_features().has_value());
}

TEST_CASE("token features gather the fused patch rows") {
    const auto dir = scratch("fused");
    auto m = small_manifest();
    m.f_im = "f_im.stk";
    m.f_pe = "f_pe.stk";
    m.f_3d = "f_3d.stk";
    io::write_manifest(dir / "scene.json", m);
    io::write_blob(dir / "depth_000.stk", {6, 1, {1, 0, 1, 1, 1, 1}});
    io::write_blob(dir / "f_im.stk", {6, 1, {1, 2, 3, 4, 5, 6}});
    io::write_blob(dir / "f_pe.stk", {6, 1, {10, 20, 30, 40, 50, 60}});
    io::write_blob(dir / "f_3d.stk", {5, 1, {100, 200, 300, 400, 500}});
    const auto s = io::load_scene(dir / "scene.json");
    const auto f = s.token_features();
    REQUIRE(f);
    CHECK(f->anchor() == Anchor::per_point);
    // Valid patches 0, 2, 3, 4, 5; each point is its own nearest scene point.
    CHECK(f->data() == std::vector<double>{111, 233, 344, 455, 566});
}

TEST_CASE("selection record round trip") {
    io::SelectionRecord r;
    r.scene = "../scene.json";
    r.selection = {{4, 0, 2}, SampleMethod::fps6d, 0.25};
    r.start = 4;
    CHECK(io::parse_selection(io::dump_selection(r)) == r);

    io::SelectionRecord v;
    v.scene = "scene.json";
    v.selection = {{0, 3}, SampleMethod::voxel_avg, std::nullopt};
    v.voxel_size = 0.2;
    v.counts = {3, 1};
    v.centroids = {Vec3(0.1, 0.2, 0.3), Vec3(1.0 / 3.0, 2, 3)};
    CHECK(io::parse_selection(io::dump_selection(v)) == v);

    CHECK_THROWS_AS(io::parse_selection(R"({"kind":"tokens"})"), InputError);
    CHECK_THROWS_AS(io::parse_selection(R"({"kind":"selection","scene":"s","method":"fps3d","start":0,"count":2,"indices":[1]})"),
                    InputError);
    CHECK_THROWS_AS(io::parse_selection(R"({"kind":"selection","scene":"s","method":"fps9d","start":0,"count":1,"indices":[1]})"),
                    InputError);
    CHECK_THROWS_AS(io::parse_selection(R"({"kind":"selection","scene":"s","method":"fps3d","start":0,"count":1,"indices":["a"]})"),
                    InputError);
}

TEST_CASE("token record round trip") {
    io::TokenRecord r;
    r.source = "sel.json";
    r.seed = 18446744073709551615ull;
    Token a;
    a.id = 5;
    a.position = Vec3(0.1, -2.5, 1e-7);
    a.patch = PatchAddress{1, 2, 3};
    a.group = 0;
    Token b;
    b.id = 2;
    b.position = Vec3(3, 4, 5);
    r.sequence = {{a, b}, Permutation::random};
    CHECK(io::parse_tokens(io::dump_tokens(r)) == r);

    auto with = r;
    with.sequence.tokens[0].feature = {0.5, 1.5};
    with.sequence.tokens[1].feature = {-1.0, 2.0};
    const auto blob = io::token_feature_blob(with.sequence);
    REQUIRE(blob);
    auto back = io::parse_tokens(io::dump_tokens(with));
    io::attach_features(back.sequence, io::decode_blob(io::encode_blob(*blob)));
    CHECK(back == with);
    CHECK_FALSE(io::token_feature_blob(r.sequence).has_value());
    CHECK_THROWS_AS(io::attach_features(back.sequence, {3, 1, {0, 0, 0}}), InputError);
}

TEST_CASE("boxes file round trip") {
    const auto dir = scratch("boxes");
    const std::vector<ObjectBox> boxes{ObjectBox(Vec3(0, 0, 0), Vec3(1, 2, 3), "a"), ObjectBox(Vec3(-1, -1, -1), Vec3(0, 0, 0))};
    io::write_boxes(dir / "boxes.json", boxes);
    const auto back = io::read_boxes(dir / "boxes.json");
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(io::to_record(back[i]) == io::to_record(boxes[i]));
    io::write_text(dir / "bare.json", R"([{"min":[0,0,0],"max":[1,1,1]}])");
    CHECK(io::read_boxes(dir / "bare.json").size() == 1);
    io::write_text(dir / "neg.json", R"([{"min":[0,0,0],"max":[1,-1,1]}])");
    CHECK_THROWS_AS(io::read_boxes(dir / "neg.json"), InputError);
}

TEST_CASE("score CSV") {
    const auto rows = io::parse_score_csv("Ac25,C\n10,20\n-,5\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at(Metric::C) == 20.0);
    CHECK_FALSE(rows[1].has(Metric::Ac25));
    CHECK(io::parse_score_csv(io::dump_score_csv(rows)) == rows);
    CHECK_THROWS_AS(io::parse_score_csv("Ac25,BLEU\n1,2\n"), InputError);
    CHECK_THROWS_AS(io::parse_score_csv("Ac25,C\n1\n"), InputError);
    CHECK_THROWS_AS(io::parse_score_csv("Ac25\nabc\n"), InputError);
    CHECK_THROWS_AS(io::parse_score_csv("Ac25\n"), InputError);
    CHECK_THROWS_AS(io::parse_score_csv("Ac25,Ac25\n1,1\n"), InputError);
    CHECK(io::read_score_table(SCENETOK_DATA_DIR "/vid3dllm_released.csv").at(Metric::C) == 102.0);
    CHECK_THROWS_AS(io::read_score_table(SCENETOK_DATA_DIR "/video_based_seeds.csv"), InputError);
}

TEST_CASE("stats output") {
    SamplingStats s;
    s.points_per_view_std = 1.5;
    s.points = 10;
    s.views = 2;
    const auto text = io::dump_stats(s);
    CHECK(text.find("\"points_per_view_std\": 1.5") != std::string::npos);
    CHECK(io::stats_csv_header().find("views_per_neighborhood_mean") != std::string::npos);
    CHECK(io::stats_csv_row(s).find("1.5") != std::string::npos);
}

}  // TEST_SUITE
