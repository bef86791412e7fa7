#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace scenetok {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Intrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;

    bool operator==(const Intrinsics&) const = default;
};

// Pinhole camera with a camera-to-world pose. The translation is the camera
// origin in world coordinates.
class CameraView {
public:
    CameraView(int index, const Intrinsics& intrinsics, const Mat3& rotation, const Vec3& translation);

    int index() const { return index_; }
    const Intrinsics& intrinsics() const { return intrinsics_; }
    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }

    // Camera frame -> world frame.
    Vec3 to_world(const Vec3& camera_point) const { return rotation_ * camera_point + translation_; }
    Vec3 to_camera(const Vec3& world_point) const { return rotation_.transpose() * (world_point - translation_); }

private:
    int index_;
    Intrinsics intrinsics_;
    Mat3 rotation_;
    Vec3 translation_;
};

// Address of one patch: view k, patch row u, patch column v.
struct PatchAddress {
    int view = 0;
    int row = 0;
    int col = 0;

    auto operator<=>(const PatchAddress&) const = default;
};

// Row-major depth image in meters.
struct DepthMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

// V x H x W arrangement of patch world coordinates with validity flags.
class PatchGrid {
public:
    PatchGrid(int views, int height, int width);

    int views() const { return views_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return coords_.size(); }

    std::size_t flat_index(const PatchAddress& a) const {
        return (static_cast<std::size_t>(a.view) * height_ + a.row) * width_ + a.col;
    }
    PatchAddress address(std::size_t flat) const;

    const Vec3& coord(const PatchAddress& a) const { return coords_[flat_index(a)]; }
    bool valid(const PatchAddress& a) const { return valid_[flat_index(a)] != 0; }
    const Vec3& coord(std::size_t flat) const { return coords_[flat]; }
    bool valid(std::size_t flat) const { return valid_[flat] != 0; }

    // A non-finite coordinate is always stored as invalid.
    void set(const PatchAddress& a, const Vec3& coord, bool valid);

    std::size_t valid_count() const;
    std::size_t valid_count(int view) const;

    // Concatenates single- or multi-view grids of equal H x W along the view axis.
    static PatchGrid stack(std::span<const PatchGrid> slices);

private:
    int views_;
    int height_;
    int width_;
    std::vector<Vec3> coords_;
    std::vector<std::uint8_t> valid_;
};

// Points with the camera that observed each of them.
class ViewedPointCloud {
public:
    ViewedPointCloud() = default;
    ViewedPointCloud(std::vector<Vec3> positions, std::vector<int> view_ids, std::vector<Vec3> view_origins,
                     std::vector<std::optional<PatchAddress>> source_patch);
    // Convenience constructor: origins looked up from the view table, no patch provenance.
    ViewedPointCloud(std::vector<Vec3> positions, std::vector<int> view_ids, std::span<const CameraView> views);

    std::size_t size() const { return positions_.size(); }
    bool empty() const { return positions_.empty(); }

    const std::vector<Vec3>& positions() const { return positions_; }
    const std::vector<int>& view_ids() const { return view_ids_; }
    const std::vector<Vec3>& view_origins() const { return view_origins_; }
    const std::vector<std::optional<PatchAddress>>& source_patch() const { return source_patch_; }

    // Points at the given indices, in the given order.
    ViewedPointCloud subset(std::span<const std::size_t> indices) const;

private:
    std::vector<Vec3> positions_;
    std::vector<int> view_ids_;
    std::vector<Vec3> view_origins_;
    std::vector<std::optional<PatchAddress>> source_patch_;
};

// Dense row-major N x D matrix of points, the input of the generic samplers.
class PointMatrix {
public:
    PointMatrix() = default;
    PointMatrix(std::size_t dim, std::vector<double> data);
    static PointMatrix from_positions(std::span<const Vec3> positions);

    std::size_t rows() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    const std::vector<double>& data() const { return data_; }

    PointMatrix scaled(double factor) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

// Spatial/view blend of a single point: [sqrt(1-w) * spatial ; sqrt(w) * view].
struct Point6D {
    Vec3 spatial = Vec3::Zero();
    Vec3 view = Vec3::Zero();
    double weight = 0.5;

    Eigen::Matrix<double, 6, 1> lifted() const;
};

// Pixel-center patches of one depth map, unprojected to world space. The
// depth map must be exactly (grid_height * stride) x (grid_width * stride).
// Pixel x runs along columns (paired with cx), pixel y along rows (with cy).
PatchGrid unproject_depth(const DepthMap& depth, const CameraView& camera, int stride, int grid_height,
                          int grid_width);

// Pixel coordinates (x, y) and depth of a world point seen by the camera.
struct Projection {
    double x;
    double y;
    double depth;
};
Projection project(const CameraView& camera, const Vec3& world_point);

// One point per valid patch, in (view, row, col) order.
ViewedPointCloud flatten_grid(const PatchGrid& grid, std::span<const CameraView> views);

void check_weight(double w);

// Rows are [sqrt(1-w) * position ; sqrt(w) * view_origin]; w in [0, 1).
PointMatrix lift_6d(const ViewedPointCloud& cloud, double w);

}  // namespace scenetok
