#include "scenetok/kdtree.hpp"

#include "scenetok/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

namespace scenetok {
namespace {

struct Candidate {
    double dist;
    std::size_t index;
    bool operator<(const Candidate& o) const { return dist < o.dist || (dist == o.dist && index < o.index); }
};

// Lower bound on the squared distance from q to any point in [lo, hi]. Each
// gap is rounded no larger than the matching component difference of a
// contained point, so the bound never exceeds a computed squared_distance.
double box_distance(const Vec3& q, const Vec3& lo, const Vec3& hi) {
    double sum = 0.0;
    for (int a = 0; a < 3; ++a) {
        double gap = 0.0;
        if (q[a] < lo[a])
            gap = lo[a] - q[a];
        else if (q[a] > hi[a])
            gap = q[a] - hi[a];
        sum += gap * gap;
    }
    return sum;
}

}  // namespace

KdTree::KdTree(std::span<const Vec3> points, std::size_t leaf_size) : points_(points.begin(), points.end()) {
    require(leaf_size >= 1, "kd-tree leaf size must be >= 1");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!points_.empty()) build(0, points_.size(), leaf_size);
}

int KdTree::build(std::size_t begin, std::size_t end, std::size_t leaf_size) {
    Node node;
    node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
        node.lo = node.lo.cwiseMin(points_[order_[i]]);
        node.hi = node.hi.cwiseMax(points_[order_[i]]);
    }
    node.begin = begin;
    node.end = end;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= leaf_size) return id;

    int axis = 0;
    (node.hi - node.lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         const double pa = points_[a][axis], pb = points_[b][axis];
                         return pa < pb || (pa == pb && a < b);
                     });
    const int left = build(begin, mid, leaf_size);
    const int right = build(mid, end, leaf_size);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

std::size_t KdTree::nearest(const Vec3& query) const {
    const auto r = knn(query, 1);
    require(!r.empty(), "nearest-neighbor query on an empty point set");
    return r.front();
}

std::vector<std::size_t> KdTree::knn(const Vec3& query, std::size_t k, std::optional<std::size_t> exclude) const {
    std::vector<Candidate> heap;  // max-heap under Candidate::operator<
    if (k == 0 || nodes_.empty()) return {};
    heap.reserve(k + 1);

    auto worst = [&]() {
        return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.front().dist;
    };

    // Explicit stack; nearer child visited first.
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (box_distance(query, node.lo, node.hi) > worst()) continue;
        if (node.left < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                if (exclude && *exclude == idx) continue;
                const Candidate c{squared_distance(query, points_[idx]), idx};
                if (heap.size() < k) {
                    heap.push_back(c);
                    std::push_heap(heap.begin(), heap.end());
                } else if (c < heap.front()) {
                    std::pop_heap(heap.begin(), heap.end());
                    heap.back() = c;
                    std::push_heap(heap.begin(), heap.end());
                }
            }
            continue;
        }
        const Node& l = nodes_[node.left];
        const Node& r = nodes_[node.right];
        const double dl = box_distance(query, l.lo, l.hi);
        const double dr = box_distance(query, r.lo, r.hi);
        if (dl <= dr) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    std::sort_heap(heap.begin(), heap.end());
    std::vector<std::size_t> out;
    out.reserve(heap.size());
    for (const auto& c : heap) out.push_back(c.index);
    return out;
}

}  // namespace scenetok
