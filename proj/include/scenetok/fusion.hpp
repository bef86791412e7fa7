#pragma once

#include "scenetok/features.hpp"
#include "scenetok/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scenetok {

// For each patch of a grid, the index of the closest scene point.
struct NearestIndexMap {
    int views = 0;
    int height = 0;
    int width = 0;
    std::vector<std::size_t> indices;  // meaningful only where valid
    std::vector<std::uint8_t> valid;

    std::size_t size() const { return indices.size(); }
};

// Exact Euclidean argmin per valid patch, ties to the lowest scene index.
NearestIndexMap nearest_neighbor_map(const ViewedPointCloud& scene, const PatchGrid& grid);
NearestIndexMap nearest_neighbor_map(std::span<const Vec3> scene_points, const PatchGrid& grid);

// token(k,u,v) = f_im(k,u,v) + f_3d(nn(k,u,v)) + f_pe(k,u,v) at valid
// patches; invalid patches get a zero vector.
FeatureSet fuse_tokens(const FeatureSet& f_im, const FeatureSet& f_3d, const FeatureSet& f_pe,
                       const NearestIndexMap& nn);

}  // namespace scenetok
