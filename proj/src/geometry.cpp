#include "scenetok/geometry.hpp"

#include "scenetok/error.hpp"

#include <cmath>
#include <string>

namespace scenetok {

CameraView::CameraView(int index, const Intrinsics& intrinsics, const Mat3& rotation, const Vec3& translation)
    : index_(index), intrinsics_(intrinsics), rotation_(rotation), translation_(translation) {
    require(intrinsics.fx > 0.0 && intrinsics.fy > 0.0, "camera " + std::to_string(index) + ": fx and fy must be positive");
    require(std::isfinite(intrinsics.cx) && std::isfinite(intrinsics.cy), "camera principal point must be finite");
    require(translation.allFinite(), "camera translation must be finite");
    const Mat3 gram = rotation * rotation.transpose();
    const double err = (gram - Mat3::Identity()).cwiseAbs().maxCoeff();
    require(rotation.allFinite() && err <= 1e-6, "camera " + std::to_string(index) + ": rotation is not orthonormal");
}

PatchGrid::PatchGrid(int views, int height, int width) : views_(views), height_(height), width_(width) {
    require(views >= 1 && height >= 1 && width >= 1, "patch grid dimensions must be >= 1");
    const auto n = static_cast<std::size_t>(views) * height * width;
    coords_.assign(n, Vec3::Zero());
    valid_.assign(n, 0);
}

PatchAddress PatchGrid::address(std::size_t flat) const {
    const auto per_view = static_cast<std::size_t>(height_) * width_;
    const auto k = flat / per_view;
    const auto rem = flat % per_view;
    return {static_cast<int>(k), static_cast<int>(rem / width_), static_cast<int>(rem % width_)};
}

void PatchGrid::set(const PatchAddress& a, const Vec3& coord, bool valid) {
    require(a.view >= 0 && a.view < views_ && a.row >= 0 && a.row < height_ && a.col >= 0 && a.col < width_,
            "patch address out of range");
    const auto i = flat_index(a);
    const bool ok = valid && coord.allFinite();
    coords_[i] = ok ? coord : Vec3::Zero();
    valid_[i] = ok ? 1 : 0;
}

std::size_t PatchGrid::valid_count() const {
    std::size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
}

std::size_t PatchGrid::valid_count(int view) const {
    const auto per_view = static_cast<std::size_t>(height_) * width_;
    std::size_t n = 0;
    for (std::size_t i = 0; i < per_view; ++i) n += valid_[view * per_view + i];
    return n;
}

PatchGrid PatchGrid::stack(std::span<const PatchGrid> slices) {
    require(!slices.empty(), "cannot stack zero patch grids");
    int total = 0;
    for (const auto& s : slices) {
        require(s.height_ == slices[0].height_ && s.width_ == slices[0].width_, "stacked grids must share H x W");
        total += s.views_;
    }
    PatchGrid out(total, slices[0].height_, slices[0].width_);
    out.coords_.clear();
    out.valid_.clear();
    for (const auto& s : slices) {
        out.coords_.insert(out.coords_.end(), s.coords_.begin(), s.coords_.end());
        out.valid_.insert(out.valid_.end(), s.valid_.begin(), s.valid_.end());
    }
    return out;
}

ViewedPointCloud::ViewedPointCloud(std::vector<Vec3> positions, std::vector<int> view_ids,
                                   std::vector<Vec3> view_origins,
                                   std::vector<std::optional<PatchAddress>> source_patch)
    : positions_(std::move(positions)),
      view_ids_(std::move(view_ids)),
      view_origins_(std::move(view_origins)),
      source_patch_(std::move(source_patch)) {
    const auto n = positions_.size();
    require(view_ids_.size() == n && view_origins_.size() == n && source_patch_.size() == n,
            "point cloud sequences must have identical length");
    for (std::size_t i = 0; i < n; ++i) {
        require(positions_[i].allFinite() && view_origins_[i].allFinite(), "point cloud coordinates must be finite");
        require(view_ids_[i] >= 0, "view ids must be non-negative");
    }
}

ViewedPointCloud::ViewedPointCloud(std::vector<Vec3> positions, std::vector<int> view_ids,
                                   std::span<const CameraView> views) {
    require(positions.size() == view_ids.size(), "point cloud sequences must have identical length");
    std::vector<Vec3> origins;
    origins.reserve(view_ids.size());
    for (int id : view_ids) {
        require(id >= 0 && static_cast<std::size_t>(id) < views.size(), "view id " + std::to_string(id) + " not in view table");
        origins.push_back(views[id].translation());
    }
    const auto n = positions.size();
    *this = ViewedPointCloud(std::move(positions), std::move(view_ids), std::move(origins),
                             std::vector<std::optional<PatchAddress>>(n));
}

ViewedPointCloud ViewedPointCloud::subset(std::span<const std::size_t> indices) const {
    std::vector<Vec3> pos, org;
    std::vector<int> ids;
    std::vector<std::optional<PatchAddress>> src;
    pos.reserve(indices.size());
    org.reserve(indices.size());
    ids.reserve(indices.size());
    src.reserve(indices.size());
    for (auto i : indices) {
        require(i < size(), "subset index out of range");
        pos.push_back(positions_[i]);
        ids.push_back(view_ids_[i]);
        org.push_back(view_origins_[i]);
        src.push_back(source_patch_[i]);
    }
    return {std::move(pos), std::move(ids), std::move(org), std::move(src)};
}

PointMatrix::PointMatrix(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    require(dim >= 1, "point dimension must be >= 1");
    require(data_.size() % dim == 0, "point data length is not a multiple of the dimension");
}

PointMatrix PointMatrix::from_positions(std::span<const Vec3> positions) {
    std::vector<double> data;
    data.reserve(positions.size() * 3);
    for (const auto& p : positions) data.insert(data.end(), {p.x(), p.y(), p.z()});
    return {3, std::move(data)};
}

PointMatrix PointMatrix::scaled(double factor) const {
    auto data = data_;
    for (auto& x : data) x *= factor;
    return {dim_, std::move(data)};
}

Eigen::Matrix<double, 6, 1> Point6D::lifted() const {
    check_weight(weight);
    Eigen::Matrix<double, 6, 1> out;
    out << std::sqrt(1.0 - weight) * spatial, std::sqrt(weight) * view;
    return out;
}

PatchGrid unproject_depth(const DepthMap& depth, const CameraView& camera, int stride, int grid_height,
                          int grid_width) {
    require(stride >= 1, "patch stride must be >= 1");
    require(grid_height >= 1 && grid_width >= 1, "grid dimensions must be >= 1");
    require(depth.values.size() == static_cast<std::size_t>(depth.height) * depth.width,
            "depth map buffer does not match its declared size");
    require(depth.height == grid_height * stride && depth.width == grid_width * stride,
            "depth map " + std::to_string(depth.height) + "x" + std::to_string(depth.width) +
                " does not match grid " + std::to_string(grid_height) + "x" + std::to_string(grid_width) +
                " at stride " + std::to_string(stride));

    const auto& K = camera.intrinsics();
    PatchGrid grid(1, grid_height, grid_width);
    for (int u = 0; u < grid_height; ++u) {
        for (int v = 0; v < grid_width; ++v) {
            const int py = u * stride + stride / 2;
            const int px = v * stride + stride / 2;
            const double d = depth.at(py, px);
            if (!std::isfinite(d) || d <= 0.0) {
                grid.set({0, u, v}, Vec3::Zero(), false);
                continue;
            }
            const Vec3 cam(d * (px - K.cx) / K.fx, d * (py - K.cy) / K.fy, d);
            grid.set({0, u, v}, camera.to_world(cam), true);
        }
    }
    return grid;
}

Projection project(const CameraView& camera, const Vec3& world_point) {
    const Vec3 c = camera.to_camera(world_point);
    const auto& K = camera.intrinsics();
    return {K.fx * c.x() / c.z() + K.cx, K.fy * c.y() / c.z() + K.cy, c.z()};
}

ViewedPointCloud flatten_grid(const PatchGrid& grid, std::span<const CameraView> views) {
    require(views.size() >= static_cast<std::size_t>(grid.views()),
            "view table has " + std::to_string(views.size()) + " entries, grid has " + std::to_string(grid.views()) +
                " views");
    std::vector<Vec3> pos, org;
    std::vector<int> ids;
    std::vector<std::optional<PatchAddress>> src;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.valid(i)) continue;
        const auto a = grid.address(i);
        pos.push_back(grid.coord(i));
        ids.push_back(a.view);
        org.push_back(views[a.view].translation());
        src.emplace_back(a);
    }
    return {std::move(pos), std::move(ids), std::move(org), std::move(src)};
}

void check_weight(double w) {
    require(std::isfinite(w) && w >= 0.0 && w < 1.0, "view weight w must lie in [0, 1)");
}

PointMatrix lift_6d(const ViewedPointCloud& cloud, double w) {
    check_weight(w);
    const double a = std::sqrt(1.0 - w);
    const double b = std::sqrt(w);
    std::vector<double> data;
    data.reserve(cloud.size() * 6);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.positions()[i];
        const auto& t = cloud.view_origins()[i];
        data.insert(data.end(), {a * p.x(), a * p.y(), a * p.z(), b * t.x(), b * t.y(), b * t.z()});
    }
    return {6, std::move(data)};
}

}  // namespace scenetok
