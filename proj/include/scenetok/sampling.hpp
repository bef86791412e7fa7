#pragma once

#include "scenetok/features.hpp"
#include "scenetok/geometry.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace scenetok {

enum class SampleMethod { fps, fps3d, fps6d, voxel_avg };

std::string_view to_string(SampleMethod method);
SampleMethod parse_sample_method(std::string_view name);

inline constexpr double kDefaultViewWeight = 0.5;
inline constexpr double kDefaultVoxelSize = 0.2;

struct SampleSelection {
    std::vector<std::size_t> indices;  // selection order
    SampleMethod method = SampleMethod::fps;
    std::optional<double> weight;

    bool operator==(const SampleSelection&) const = default;
};

// Distance used by every farthest-point sampler: sum of squared component
// differences, accumulated in component order.
double squared_distance(std::span<const double> a, std::span<const double> b);

// Farthest point sampling. The first sample is `start`; every later sample
// maximizes the squared distance to its nearest selected point, ties going
// to the lowest index. Exact: the result equals fps_oracle bit for bit.
SampleSelection fps(const PointMatrix& points, std::size_t m, std::size_t start = 0);

// Naive reference: recomputes every min-distance from scratch each step.
// Limited to N <= 2000.
SampleSelection fps_oracle(const PointMatrix& points, std::size_t m, std::size_t start = 0);

inline constexpr std::size_t kOracleMaxPoints = 2000;

SampleSelection fps3d(const ViewedPointCloud& cloud, std::size_t m, std::size_t start = 0);

// fps over lift_6d(cloud, w).
SampleSelection fps6d(const ViewedPointCloud& cloud, std::size_t m, double w = kDefaultViewWeight,
                      std::size_t start = 0);

using VoxelKey = std::array<std::int64_t, 3>;  // (x, y, z) cell indices

struct VoxelResult {
    std::vector<VoxelKey> keys;
    std::vector<Vec3> centroids;
    std::optional<FeatureSet> features;
    std::vector<std::size_t> counts;
    std::vector<std::size_t> representatives;  // lowest member index per voxel
};

VoxelKey voxel_key(const Vec3& p, double voxel_size);

// Buckets points by floor(p / voxel_size) and averages positions (and
// features when given) per bucket. Output is sorted by (z, y, x) cell index.
VoxelResult voxel_average(const ViewedPointCloud& cloud, const std::optional<FeatureSet>& features,
                          double voxel_size = kDefaultVoxelSize);

}  // namespace scenetok
