#include "scenetok/fusion.hpp"

#include "scenetok/error.hpp"
#include "scenetok/kdtree.hpp"

#include <string>

namespace scenetok {

NearestIndexMap nearest_neighbor_map(const ViewedPointCloud& scene, const PatchGrid& grid) {
    return nearest_neighbor_map(scene.positions(), grid);
}

NearestIndexMap nearest_neighbor_map(std::span<const Vec3> scene_points, const PatchGrid& grid) {
    require(!scene_points.empty(), "nearest-neighbor map needs a non-empty scene cloud");
    const KdTree tree(scene_points);
    NearestIndexMap out;
    out.views = grid.views();
    out.height = grid.height();
    out.width = grid.width();
    out.indices.assign(grid.size(), 0);
    out.valid.assign(grid.size(), 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.valid(i)) continue;
        out.indices[i] = tree.nearest(grid.coord(i));
        out.valid[i] = 1;
    }
    return out;
}

FeatureSet fuse_tokens(const FeatureSet& f_im, const FeatureSet& f_3d, const FeatureSet& f_pe,
                       const NearestIndexMap& nn) {
    const std::size_t dim = f_im.dim();
    require(f_3d.dim() == dim && f_pe.dim() == dim,
            "feature dimensions differ: f_im " + std::to_string(f_im.dim()) + ", f_3d " + std::to_string(f_3d.dim()) +
                ", f_pe " + std::to_string(f_pe.dim()));
    require(f_im.anchor() == Anchor::per_patch && f_pe.anchor() == Anchor::per_patch,
            "f_im and f_pe must be per-patch features");
    require(f_3d.anchor() == Anchor::per_point, "f_3d must be per-point features");
    require(nn.valid.size() == nn.indices.size(), "malformed nearest-index map");
    require(f_im.count() == nn.size() && f_pe.count() == nn.size(),
            "per-patch feature count does not match the nearest-index map (" + std::to_string(nn.size()) + " patches)");

    auto out = FeatureSet::zeros(nn.size(), dim, Anchor::per_patch);
    for (std::size_t i = 0; i < nn.size(); ++i) {
        if (!nn.valid[i]) continue;
        require(nn.indices[i] < f_3d.count(), "nearest index " + std::to_string(nn.indices[i]) + " outside f_3d");
        const auto a = f_im.row(i);
        const auto b = f_3d.row(nn.indices[i]);
        const auto c = f_pe.row(i);
        auto o = out.row(i);
        for (std::size_t d = 0; d < dim; ++d) o[d] = a[d] + b[d] + c[d];
    }
    return out;
}

}  // namespace scenetok
