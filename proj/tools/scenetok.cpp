// scenetok: sampling, token ordering, sampling statistics and normalized
// scores from the command line.
//
// Exit codes: 0 success, 1 internal failure, 2 input error.

#include "scenetok/error.hpp"
#include "scenetok/io.hpp"
#include "scenetok/metrics.hpp"
#include "scenetok/ordering.hpp"
#include "scenetok/sampling.hpp"
#include "scenetok/stats.hpp"
#include "scenetok/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace scenetok;

namespace {

struct SampleArgs {
    std::string method;
    long long count = -1;
    std::optional<double> weight;
    std::optional<double> voxel_size;
    long long start = 0;
    std::string input;
    std::string output;
};

struct TokenArgs {
    std::string order;
    std::optional<std::uint64_t> seed;
    std::string boxes;
    std::string input;
    std::string output;
    std::string features_out;
};

struct StatsArgs {
    long long k = static_cast<long long>(kDefaultNeighborhood);
    std::string input;
    std::string output;
    std::string csv;
};

struct ScoreArgs {
    std::string scores;
    std::string baseline;
    std::string task = "all";
    bool seeds = false;
};

struct SynthArgs {
    int rooms = 1;
    int views = 8;
    std::uint64_t seed = 0;
    int height = 48;
    int width = 64;
    int stride = 1;
    int boxes_per_room = 4;
    int feature_dim = 0;
    double dropout = 0.0;
    std::string output;
};

// Path of `target` as seen from the directory that will hold `document`.
std::string relative_to(const fs::path& target, const fs::path& document) {
    const auto base = fs::absolute(document).parent_path();
    return fs::relative(fs::absolute(target), base).generic_string();
}

fs::path resolve_from(const fs::path& document, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : fs::absolute(document).parent_path() / path;
}

std::string document_kind(const fs::path& path) {
    try {
        return nlohmann::json::parse(io::read_text(path)).value("kind", "");
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

// A scene plus the point subset a document refers to: every point for a
// manifest, the selected points for a selection record.
struct Input {
    io::Scene scene;
    std::optional<io::SelectionRecord> selection;
    std::vector<std::size_t> points;
};

Input load_input(const std::string& input) {
    require(!input.empty(), "--input is required");
    const fs::path path(input);
    const auto kind = document_kind(path);
    Input in;
    if (kind == "scene") {
        in.scene = io::load_scene(path);
        in.points.resize(in.scene.cloud.size());
        for (std::size_t i = 0; i < in.points.size(); ++i) in.points[i] = i;
    } else if (kind == "selection") {
        in.selection = io::parse_selection(io::read_text(path));
        in.scene = io::load_scene(resolve_from(path, in.selection->scene));
        in.points = in.selection->selection.indices;
        for (auto i : in.points) {
            require(i < in.scene.cloud.size(), "selection index " + std::to_string(i) + " outside the scene cloud");
        }
    } else {
        throw InputError(path.string() + ": expected a scene manifest or a selection record");
    }
    return in;
}

int run_sample(const SampleArgs& a) {
    const auto method = parse_sample_method(a.method);
    require(method != SampleMethod::fps, "--method must be one of fps3d, fps6d, voxel");
    require(method == SampleMethod::fps6d || !a.weight, "--weight is only valid with --method fps6d");
    require(method == SampleMethod::voxel_avg || !a.voxel_size, "--voxel-size is only valid with --method voxel");
    require(a.start >= 0, "--start must be >= 0");
    require(!a.output.empty(), "--output is required");
    const auto scene = io::load_scene(a.input);

    io::SelectionRecord rec;
    rec.scene = relative_to(a.input, a.output);
    rec.start = static_cast<std::size_t>(a.start);
    if (method == SampleMethod::voxel_avg) {
        require(a.count < 0, "--count is not used with --method voxel");
        const double size = a.voxel_size.value_or(kDefaultVoxelSize);
        require(size > 0.0, "--voxel-size must be positive");
        auto v = voxel_average(scene.cloud, scene.token_features(), size);
        rec.selection.method = SampleMethod::voxel_avg;
        rec.selection.indices = v.representatives;
        rec.voxel_size = size;
        rec.counts = v.counts;
        rec.centroids = v.centroids;
    } else {
        require(a.count >= 1, "--count must be >= 1");
        require(static_cast<std::size_t>(a.count) <= scene.cloud.size(),
                "--count " + std::to_string(a.count) + " exceeds the " + std::to_string(scene.cloud.size()) +
                    " valid points of the scene");
        require(static_cast<std::size_t>(a.start) < scene.cloud.size(), "--start is outside the scene cloud");
        const auto m = static_cast<std::size_t>(a.count);
        const double w = a.weight.value_or(kDefaultViewWeight);
        // FPS6D with w = 0 is plain 3D FPS; both are written identically.
        if (method == SampleMethod::fps3d || w == 0.0) {
            check_weight(w);
            rec.selection = fps3d(scene.cloud, m, rec.start);
        } else {
            rec.selection = fps6d(scene.cloud, m, w, rec.start);
        }
    }
    io::write_text(a.output, io::dump_selection(rec));
    return 0;
}

int run_tokens(const TokenArgs& a) {
    const auto order = parse_permutation(a.order);
    require(order != Permutation::none, "--order must be one of patch, random, default, objects");
    require((order == Permutation::random) == a.seed.has_value(), "--seed is required with --order random and only then");
    require(order == Permutation::objects || a.boxes.empty(), "--boxes is only valid with --order objects");
    require(!a.output.empty(), "--output is required");

    const auto in = load_input(a.input);
    const auto all = make_tokens(in.scene.cloud, in.scene.token_features());
    std::vector<Token> tokens;
    tokens.reserve(in.points.size());
    for (auto i : in.points) tokens.push_back(all[i]);

    io::TokenRecord rec;
    rec.source = relative_to(a.input, a.output);
    rec.seed = a.seed;
    switch (order) {
        case Permutation::patch: rec.sequence = order_patch(std::move(tokens)); break;
        case Permutation::random: rec.sequence = order_random(std::move(tokens), *a.seed); break;
        case Permutation::selection:
            require(in.selection.has_value(), "--order default needs a selection record as --input");
            rec.sequence = order_default(std::move(tokens), in.selection->selection);
            break;
        case Permutation::objects: {
            std::vector<ObjectBox> boxes;
            if (!a.boxes.empty()) boxes = io::read_boxes(a.boxes);
            rec.sequence = order_objects(std::move(tokens), boxes);
            break;
        }
        case Permutation::none: break;
    }
    io::write_text(a.output, io::dump_tokens(rec));
    if (!a.features_out.empty()) {
        const auto blob = io::token_feature_blob(rec.sequence);
        require(blob.has_value(), "--features-out needs a scene with f_im, f_pe and f_3d blobs");
        io::write_blob(a.features_out, *blob);
    }
    return 0;
}

int run_stats(const StatsArgs& a) {
    require(a.k >= 1, "--k must be >= 1");
    const auto in = load_input(a.input);
    const auto cloud = in.scene.cloud.subset(in.points);
    const auto stats = compute_stats(cloud, in.scene.views.size(), static_cast<std::size_t>(a.k));
    const auto text = io::dump_stats(stats);
    if (a.output.empty())
        std::cout << text;
    else
        io::write_text(a.output, text);
    if (!a.csv.empty()) io::write_text(a.csv, io::stats_csv_header() + io::stats_csv_row(stats));
    return 0;
}

int run_score(const ScoreArgs& a) {
    const auto task = parse_task(a.task);
    const auto baseline = io::read_score_table(a.baseline);
    if (a.seeds) {
        const auto runs = io::read_score_csv(a.scores);
        const auto s = multi_seed_summary(runs, baseline, task);
        std::cout << format_one_decimal(s.mean) << " ±" << format_one_decimal(s.std) << "\n";
    } else {
        std::cout << format_one_decimal(normalized_score(io::read_score_table(a.scores), baseline, task)) << "\n";
    }
    return 0;
}

int run_synth(const SynthArgs& a) {
    require(!a.output.empty(), "--output is required");
    synth::Options o;
    o.rooms = a.rooms;
    o.views = a.views;
    o.seed = a.seed;
    o.grid_height = a.height;
    o.grid_width = a.width;
    o.stride = a.stride;
    o.boxes_per_room = a.boxes_per_room;
    o.feature_dim = a.feature_dim;
    o.dropout = a.dropout;
    const auto scene = synth::generate(o);
    const auto manifest = synth::write_scene(scene, a.output);
    std::vector<ObjectBox> boxes;
    for (const auto& b : scene.manifest.boxes) boxes.push_back(io::to_box(b));
    io::write_boxes(manifest.parent_path() / "boxes.json", boxes);
    std::cout << manifest.generic_string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenetok: 3D scene token sampling, ordering and scoring"};
    app.require_subcommand(1);

    SampleArgs sample;
    auto* s = app.add_subcommand("sample", "Subsample the points of a scene");
    s->add_option("--method", sample.method, "fps3d | fps6d | voxel")->required();
    s->add_option("--count", sample.count, "Number of points to sample (fps3d, fps6d)");
    s->add_option("--weight", sample.weight, "View weight w in [0, 1) (fps6d, default 0.5)");
    s->add_option("--voxel-size", sample.voxel_size, "Voxel edge in meters (voxel, default 0.2)");
    s->add_option("--start", sample.start, "Index of the first sample");
    s->add_option("--input", sample.input, "Scene manifest")->required();
    s->add_option("--output", sample.output, "Selection record to write")->required();

    TokenArgs tokens;
    auto* t = app.add_subcommand("tokens", "Build an ordered token sequence");
    t->add_option("--order", tokens.order, "patch | random | default | objects")->required();
    t->add_option("--seed", tokens.seed, "Shuffle seed (random only)");
    t->add_option("--boxes", tokens.boxes, "Object boxes (objects only)");
    t->add_option("--input", tokens.input, "Selection record or scene manifest")->required();
    t->add_option("--output", tokens.output, "Token sequence to write")->required();
    t->add_option("--features-out", tokens.features_out, "Write fused token features as an STK1 blob");

    StatsArgs stats;
    auto* st = app.add_subcommand("stats", "View-diversity and spacing statistics of a sampled cloud");
    st->add_option("--k", stats.k, "Neighborhood size");
    st->add_option("--input", stats.input, "Selection record or scene manifest")->required();
    st->add_option("--output", stats.output, "Write the statistics object here instead of stdout");
    st->add_option("--csv", stats.csv, "Write a CSV header and row here");

    ScoreArgs score;
    auto* sc = app.add_subcommand("score", "Normalized score against a baseline");
    sc->add_option("--scores", score.scores, "Score CSV")->required();
    sc->add_option("--baseline", score.baseline, "Baseline score CSV")->required();
    sc->add_option("--task", score.task, "all | 3dvg | 3dcap | 3dqa");
    sc->add_flag("--seeds", score.seeds, "Scores hold one row per seed; print mean and population std");

    SynthArgs syn;
    auto* sy = app.add_subcommand("synth-scene", "Generate a synthetic multi-view scene");
    sy->add_option("--rooms", syn.rooms, "Number of rooms");
    sy->add_option("--views", syn.views, "Number of camera views");
    sy->add_option("--seed", syn.seed, "Generator seed");
    sy->add_option("--height", syn.height, "Patch rows per view");
    sy->add_option("--width", syn.width, "Patch columns per view");
    sy->add_option("--stride", syn.stride, "Pixels per patch side");
    sy->add_option("--boxes-per-room", syn.boxes_per_room, "Objects per room");
    sy->add_option("--feature-dim", syn.feature_dim, "Write random f_im/f_pe/f_3d blobs of this dimension");
    sy->add_option("--dropout", syn.dropout, "Fraction of pixels with missing depth");
    sy->add_option("--output", syn.output, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "scenetok: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*s) return run_sample(sample);
        if (*t) return run_tokens(tokens);
        if (*st) return run_stats(stats);
        if (*sc) return run_score(score);
        if (*sy) return run_synth(syn);
    } catch (const InputError& e) {
        std::cerr << "scenetok: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "scenetok: internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
