#pragma once

#include "scenetok/features.hpp"
#include "scenetok/geometry.hpp"
#include "scenetok/metrics.hpp"
#include "scenetok/ordering.hpp"
#include "scenetok/sampling.hpp"
#include "scenetok/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scenetok::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// STK1 blobs: "STK1", u32 count, u32 dim (little endian), then count * dim
// little-endian float32 values, row-major. Size is exactly 12 + 4*count*dim.

struct Blob {
    std::uint32_t count = 0;
    std::uint32_t dim = 0;
    std::vector<float> values;

    bool operator==(const Blob&) const = default;
};

std::string encode_blob(const Blob& blob);
Blob decode_blob(std::string_view bytes);
void write_blob(const fs::path& path, const Blob& blob);
Blob read_blob(const fs::path& path);

Blob to_blob(const FeatureSet& features);
FeatureSet to_features(const Blob& blob, Anchor anchor);
// dim must be 1 and count == height * width.
DepthMap to_depth(const Blob& blob, int height, int width);
Blob to_blob(const DepthMap& depth);

// ---------------------------------------------------------------------------
// Scene manifests (JSON). Relative paths resolve against the manifest's
// directory.

struct ViewRecord {
    int index = 0;
    Intrinsics intrinsics;
    std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major, camera -> world
    std::array<double, 3> translation{0, 0, 0};
    std::string depth;

    bool operator==(const ViewRecord&) const = default;
};

struct BoxRecord {
    std::array<double, 3> min{};
    std::array<double, 3> max{};
    std::string label;

    bool operator==(const BoxRecord&) const = default;
};

struct SceneManifest {
    int grid_height = 1;
    int grid_width = 1;
    int stride = 1;
    std::vector<ViewRecord> views;
    std::optional<std::string> f_im;
    std::optional<std::string> f_pe;
    std::optional<std::string> f_3d;
    std::optional<std::string> scene_points;  // STK1 with dim 3; defaults to the unprojected patches
    std::vector<BoxRecord> boxes;

    bool operator==(const SceneManifest&) const = default;
};

std::string dump_manifest(const SceneManifest& manifest);
SceneManifest parse_manifest(std::string_view text);
void write_manifest(const fs::path& path, const SceneManifest& manifest);
SceneManifest read_manifest(const fs::path& path);

CameraView to_camera(const ViewRecord& record);
ObjectBox to_box(const BoxRecord& record);
BoxRecord to_record(const ObjectBox& box);

std::vector<ObjectBox> read_boxes(const fs::path& path);
void write_boxes(const fs::path& path, std::span<const ObjectBox> boxes);

// A manifest with every referenced file loaded and checked.
struct Scene {
    SceneManifest manifest;
    fs::path directory;
    std::vector<CameraView> views;
    PatchGrid grid{1, 1, 1};
    ViewedPointCloud cloud;  // one point per valid patch
    std::vector<Vec3> scene_points;
    std::optional<FeatureSet> f_im;
    std::optional<FeatureSet> f_pe;
    std::optional<FeatureSet> f_3d;
    std::vector<ObjectBox> boxes;

    // Fused per-point token features for `cloud`, when all three feature
    // blobs are present.
    std::optional<FeatureSet> token_features() const;
};

// Builds a scene from in-memory parts; depths[k] belongs to manifest.views[k].
// An empty `scene_points` means "use the unprojected patches".
Scene assemble_scene(SceneManifest manifest, std::span<const DepthMap> depths, std::optional<FeatureSet> f_im = {},
                     std::optional<FeatureSet> f_pe = {}, std::optional<FeatureSet> f_3d = {},
                     std::vector<Vec3> scene_points = {});

Scene load_scene(const fs::path& manifest_path);

// ---------------------------------------------------------------------------
// Selection records.

struct SelectionRecord {
    std::string scene;  // manifest path relative to the record's directory
    SampleSelection selection;
    std::size_t start = 0;
    std::optional<double> voxel_size;
    std::vector<std::size_t> counts;  // voxel_avg only
    std::vector<Vec3> centroids;      // voxel_avg only

    bool operator==(const SelectionRecord&) const = default;
};

std::string dump_selection(const SelectionRecord& record);
SelectionRecord parse_selection(std::string_view text);

// ---------------------------------------------------------------------------
// Token sequences. Features, when present, go to a separate STK1 blob.

struct TokenRecord {
    std::string source;
    std::optional<std::uint64_t> seed;
    TokenSequence sequence;

    bool operator==(const TokenRecord&) const = default;
};

std::string dump_tokens(const TokenRecord& record);
TokenRecord parse_tokens(std::string_view text);
// Attaches rows of a blob as token features, in sequence order.
void attach_features(TokenSequence& sequence, const Blob& blob);
std::optional<Blob> token_feature_blob(const TokenSequence& sequence);

// ---------------------------------------------------------------------------
// Score CSVs: header of metric names, then data rows; "-" marks a missing value.

std::vector<ScoreTable> parse_score_csv(std::string_view text);
std::vector<ScoreTable> read_score_csv(const fs::path& path);
// Exactly one data row.
ScoreTable read_score_table(const fs::path& path);
std::string dump_score_csv(std::span<const ScoreTable> rows);

// ---------------------------------------------------------------------------

std::string dump_stats(const SamplingStats& stats);
std::string stats_csv_header();
std::string stats_csv_row(const SamplingStats& stats);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

}  // namespace scenetok::io
