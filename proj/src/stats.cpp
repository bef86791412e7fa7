#include "scenetok/stats.hpp"

#include "scenetok/error.hpp"
#include "scenetok/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scenetok {

MeanStd mean_and_population_std(const std::vector<double>& values) {
    require(!values.empty(), "mean of an empty sequence");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

double points_per_view_std(const ViewedPointCloud& cloud, std::size_t view_count) {
    require(!cloud.empty(), "points-per-view statistic needs a non-empty cloud");
    require(view_count >= 1, "view count must be >= 1");
    std::vector<double> counts(view_count, 0.0);
    for (int id : cloud.view_ids()) {
        require(static_cast<std::size_t>(id) < view_count,
                "view id " + std::to_string(id) + " outside view table of size " + std::to_string(view_count));
        counts[id] += 1.0;
    }
    return mean_and_population_std(counts).std;
}

NeighborhoodViews views_per_neighborhood(const ViewedPointCloud& cloud, std::size_t k) {
    require(k >= 1, "neighborhood size must be >= 1");
    require(cloud.size() > k, "neighborhood size k=" + std::to_string(k) + " needs more than k points, got " +
                                  std::to_string(cloud.size()));
    const KdTree tree(cloud.positions());
    NeighborhoodViews out;
    out.counts.resize(cloud.size());
    std::vector<int> ids;
    std::vector<double> as_double(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        ids.clear();
        for (auto j : tree.knn(cloud.positions()[i], k, i)) ids.push_back(cloud.view_ids()[j]);
        std::sort(ids.begin(), ids.end());
        out.counts[i] = static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
        as_double[i] = static_cast<double>(out.counts[i]);
    }
    out.mean = mean_and_population_std(as_double).mean;
    return out;
}

NearestDistances nn_distance(const ViewedPointCloud& cloud) {
    require(cloud.size() >= 2, "nearest-neighbor distance needs at least two points");
    const KdTree tree(cloud.positions());
    NearestDistances out;
    out.distances.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto nn = tree.knn(cloud.positions()[i], 1, i);
        out.distances[i] = std::sqrt(squared_distance(cloud.positions()[i], cloud.positions()[nn.front()]));
    }
    const auto ms = mean_and_population_std(out.distances);
    out.mean = ms.mean;
    out.std = ms.std;
    return out;
}

SamplingStats compute_stats(const ViewedPointCloud& cloud, std::size_t view_count, std::size_t k) {
    SamplingStats s;
    s.k = k;
    s.points = cloud.size();
    s.views = view_count;
    s.points_per_view_std = points_per_view_std(cloud, view_count);
    s.views_per_neighborhood_mean = views_per_neighborhood(cloud, k).mean;
    const auto nn = nn_distance(cloud);
    s.nn_distance_mean = nn.mean;
    s.nn_distance_std = nn.std;
    return s;
}

}  // namespace scenetok
