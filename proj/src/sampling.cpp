#include "scenetok/sampling.hpp"

#include "scenetok/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

namespace scenetok {
namespace {

void check_fps_args(const PointMatrix& points, std::size_t m, std::size_t start) {
    require(points.rows() > 0, "cannot sample from an empty point set");
    require(m >= 1, "sample count must be >= 1");
    require(m <= points.rows(),
            "sample count " + std::to_string(m) + " exceeds point count " + std::to_string(points.rows()));
    require(start < points.rows(), "start index " + std::to_string(start) + " out of range");
    for (double x : points.data()) require(std::isfinite(x), "point coordinates must be finite");
}

struct Best {
    double value;
    std::size_t index;
};

// a beats b: larger value, then lower index.
bool beats(const Best& a, const Best& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
}

constexpr double kSelected = -1.0;

// Bounding-box tree over the points. Each node caches the best (max
// min-distance, lowest index) candidate below it. A new sample can only
// lower min-distances of points closer to it than their current value, so a
// node whose box lower bound is >= its cached max is left untouched. The
// bound is rounded no larger than any contained point's computed distance,
// which keeps the pruning exact.
class FpsTree {
public:
    FpsTree(const PointMatrix& points, std::size_t leaf_size) : dim_(points.dim()), n_(points.rows()) {
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        src_ = &points;
        leaf_of_.assign(n_, -1);
        build(0, n_, -1, leaf_size);
        // Permuted copy so leaf scans are contiguous.
        coords_.resize(n_ * dim_);
        for (std::size_t pos = 0; pos < n_; ++pos) {
            const auto r = points.row(order_[pos]);
            std::copy(r.begin(), r.end(), coords_.begin() + pos * dim_);
        }
        position_of_.resize(n_);
        for (std::size_t pos = 0; pos < n_; ++pos) position_of_[order_[pos]] = pos;
        mind_.assign(n_, std::numeric_limits<double>::infinity());
        for (std::size_t id = nodes_.size(); id-- > 0;) refresh(static_cast<int>(id));
    }

    void select(std::size_t index) {
        const auto pos = position_of_[index];
        mind_[pos] = kSelected;
        for (int id = leaf_of_[pos]; id >= 0; id = nodes_[id].parent) refresh(id);
        query_ = std::span<const double>(coords_.data() + pos * dim_, dim_);
        update(0);
    }

    Best best() const { return nodes_[0].best; }

private:
    struct Node {
        std::size_t begin;
        std::size_t end;
        int parent;
        int left = -1;
        int right = -1;
        std::vector<double> lo;
        std::vector<double> hi;
        Best best{};
    };

    int build(std::size_t begin, std::size_t end, int parent, std::size_t leaf_size) {
        Node node;
        node.begin = begin;
        node.end = end;
        node.parent = parent;
        node.lo.assign(dim_, std::numeric_limits<double>::infinity());
        node.hi.assign(dim_, -std::numeric_limits<double>::infinity());
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = src_->row(order_[i]);
            for (std::size_t a = 0; a < dim_; ++a) {
                node.lo[a] = std::min(node.lo[a], r[a]);
                node.hi[a] = std::max(node.hi[a], r[a]);
            }
        }
        std::size_t axis = 0;
        double spread = -1.0;
        for (std::size_t a = 0; a < dim_; ++a) {
            if (node.hi[a] - node.lo[a] > spread) {
                spread = node.hi[a] - node.lo[a];
                axis = a;
            }
        }
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(std::move(node));
        if (end - begin <= leaf_size || spread <= 0.0) {
            for (std::size_t i = begin; i < end; ++i) leaf_of_[i] = id;
            return id;
        }
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::size_t a, std::size_t b) {
                             const double pa = src_->row(a)[axis], pb = src_->row(b)[axis];
                             return pa < pb || (pa == pb && a < b);
                         });
        const int left = build(begin, mid, id, leaf_size);
        const int right = build(mid, end, id, leaf_size);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    void refresh(int id) {
        Node& node = nodes_[id];
        if (node.left < 0) {
            Best b{kSelected - 1.0, 0};
            for (std::size_t pos = node.begin; pos < node.end; ++pos) {
                const Best c{mind_[pos], order_[pos]};
                if (beats(c, b)) b = c;
            }
            node.best = b;
        } else {
            const Best& l = nodes_[node.left].best;
            const Best& r = nodes_[node.right].best;
            node.best = beats(l, r) ? l : r;
        }
    }

    double box_bound(const Node& node) const {
        double sum = 0.0;
        for (std::size_t a = 0; a < dim_; ++a) {
            double gap = 0.0;
            if (query_[a] < node.lo[a])
                gap = node.lo[a] - query_[a];
            else if (query_[a] > node.hi[a])
                gap = query_[a] - node.hi[a];
            sum += gap * gap;
        }
        return sum;
    }

    void update(int id) {
        Node& node = nodes_[id];
        if (node.best.value <= kSelected) return;
        if (box_bound(node) >= node.best.value) return;
        if (node.left < 0) {
            for (std::size_t pos = node.begin; pos < node.end; ++pos) {
                if (mind_[pos] <= kSelected) continue;
                const double d = squared_distance(query_, {coords_.data() + pos * dim_, dim_});
                if (d < mind_[pos]) mind_[pos] = d;
            }
        } else {
            update(node.left);
            update(node.right);
        }
        refresh(id);
    }

    std::size_t dim_;
    std::size_t n_;
    const PointMatrix* src_ = nullptr;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> position_of_;
    std::vector<int> leaf_of_;
    std::vector<double> coords_;
    std::vector<double> mind_;
    std::vector<Node> nodes_;
    std::span<const double> query_;
};

}  // namespace

std::string_view to_string(SampleMethod method) {
    switch (method) {
        case SampleMethod::fps: return "fps";
        case SampleMethod::fps3d: return "fps3d";
        case SampleMethod::fps6d: return "fps6d";
        case SampleMethod::voxel_avg: return "voxel_avg";
    }
    return "fps";
}

SampleMethod parse_sample_method(std::string_view name) {
    if (name == "fps") return SampleMethod::fps;
    if (name == "fps3d") return SampleMethod::fps3d;
    if (name == "fps6d") return SampleMethod::fps6d;
    if (name == "voxel_avg" || name == "voxel") return SampleMethod::voxel_avg;
    throw InputError("unknown sampling method '" + std::string(name) + "'");
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

SampleSelection fps(const PointMatrix& points, std::size_t m, std::size_t start) {
    check_fps_args(points, m, start);
    SampleSelection out;
    out.indices.reserve(m);
    FpsTree tree(points, 32);
    std::size_t next = start;
    for (std::size_t j = 0; j < m; ++j) {
        out.indices.push_back(next);
        tree.select(next);
        if (j + 1 < m) next = tree.best().index;
    }
    return out;
}

SampleSelection fps_oracle(const PointMatrix& points, std::size_t m, std::size_t start) {
    check_fps_args(points, m, start);
    require(points.rows() <= kOracleMaxPoints, "fps_oracle is limited to " + std::to_string(kOracleMaxPoints) + " points");
    const std::size_t n = points.rows();
    SampleSelection out;
    std::vector<bool> taken(n, false);
    out.indices.push_back(start);
    taken[start] = true;
    while (out.indices.size() < m) {
        std::size_t best = n;
        double best_value = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double closest = std::numeric_limits<double>::infinity();
            for (auto s : out.indices) closest = std::min(closest, squared_distance(points.row(i), points.row(s)));
            if (closest > best_value) {
                best_value = closest;
                best = i;
            }
        }
        out.indices.push_back(best);
        taken[best] = true;
    }
    return out;
}

SampleSelection fps3d(const ViewedPointCloud& cloud, std::size_t m, std::size_t start) {
    auto sel = fps(PointMatrix::from_positions(cloud.positions()), m, start);
    sel.method = SampleMethod::fps3d;
    return sel;
}

SampleSelection fps6d(const ViewedPointCloud& cloud, std::size_t m, double w, std::size_t start) {
    auto sel = fps(lift_6d(cloud, w), m, start);
    sel.method = SampleMethod::fps6d;
    sel.weight = w;
    return sel;
}

VoxelKey voxel_key(const Vec3& p, double voxel_size) {
    return {static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
}

VoxelResult voxel_average(const ViewedPointCloud& cloud, const std::optional<FeatureSet>& features,
                          double voxel_size) {
    require(std::isfinite(voxel_size) && voxel_size > 0.0, "voxel size must be positive");
    if (features) {
        require(features->count() == cloud.size(), "feature count " + std::to_string(features->count()) +
                                                       " does not match point count " + std::to_string(cloud.size()));
    }

    auto zyx = [](const VoxelKey& a, const VoxelKey& b) {
        return std::tie(a[2], a[1], a[0]) < std::tie(b[2], b[1], b[0]);
    };
    std::map<VoxelKey, std::vector<std::size_t>, decltype(zyx)> buckets(zyx);
    for (std::size_t i = 0; i < cloud.size(); ++i) buckets[voxel_key(cloud.positions()[i], voxel_size)].push_back(i);

    VoxelResult out;
    std::vector<double> feats;
    const std::size_t dim = features ? features->dim() : 0;
    for (const auto& [key, members] : buckets) {
        Vec3 sum = Vec3::Zero();
        std::vector<double> fsum(dim, 0.0);
        for (auto i : members) {
            sum += cloud.positions()[i];
            if (features) {
                const auto r = features->row(i);
                for (std::size_t d = 0; d < dim; ++d) fsum[d] += r[d];
            }
        }
        const double n = static_cast<double>(members.size());
        out.keys.push_back(key);
        out.centroids.push_back(sum / n);
        out.counts.push_back(members.size());
        out.representatives.push_back(members.front());
        for (double f : fsum) feats.push_back(f / n);
    }
    if (features) out.features = FeatureSet(out.keys.size(), dim, std::move(feats), features->anchor());
    return out;
}

}  // namespace scenetok
