#pragma once

#include "scenetok/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace scenetok::synth {

using io::SceneManifest;
using io::ViewRecord;

// Synthetic multi-view indoor scenes: closed axis-aligned rooms (z up) with
// boxes standing on the floor, observed by a ring of cameras per room.
struct Options {
    int rooms = 1;
    int views = 8;
    std::uint64_t seed = 0;
    int grid_height = 48;
    int grid_width = 64;
    int stride = 1;
    int boxes_per_room = 4;
    int feature_dim = 0;         // 0 disables f_im / f_pe / f_3d
    double dropout = 0.0;        // fraction of pixels with zero depth
    double fov_degrees = 70.0;   // horizontal
};

struct Room {
    Vec3 lo;
    Vec3 hi;
};

struct SynthScene {
    Options options;
    SceneManifest manifest;
    std::vector<DepthMap> depths;
    std::vector<Room> rooms;
    std::optional<FeatureSet> f_im;
    std::optional<FeatureSet> f_pe;
    std::optional<FeatureSet> f_3d;  // aligned with the unprojected patch cloud
};

SynthScene generate(const Options& options);

// Loads the generated parts into a Scene without touching the filesystem.
io::Scene to_scene(const SynthScene& synth);

// Writes scene.json plus STK1 depth/feature blobs into `directory`.
// Returns the manifest path.
std::filesystem::path write_scene(const SynthScene& synth, const std::filesystem::path& directory);

// Distance from p to the nearest surface of the generated geometry (room
// walls or box faces).
double surface_distance(const SynthScene& synth, const Vec3& p);

}  // namespace scenetok::synth
