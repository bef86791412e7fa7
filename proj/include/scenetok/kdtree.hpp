#pragma once

#include "scenetok/geometry.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace scenetok {

// Exact 3D kd-tree. Neighbors are ranked by (squared distance, index), so
// equal distances always resolve to the lowest point index. Subtrees are
// pruned only when their box is strictly farther than the current k-th
// candidate, which keeps the ranking identical to a linear scan.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 16);

    std::size_t size() const { return points_.size(); }

    // Index of the closest point to `query`.
    std::size_t nearest(const Vec3& query) const;

    // The k closest points to `query` sorted by (distance, index). When
    // `exclude` is set that point is skipped.
    std::vector<std::size_t> knn(const Vec3& query, std::size_t k, std::optional<std::size_t> exclude = {}) const;

private:
    struct Node {
        Vec3 lo;
        Vec3 hi;
        std::size_t begin;
        std::size_t end;
        int left = -1;
        int right = -1;
    };

    int build(std::size_t begin, std::size_t end, std::size_t leaf_size);

    std::vector<Vec3> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

// Squared distance evaluated component by component in x, y, z order.
inline double squared_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace scenetok
