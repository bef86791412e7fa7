#pragma once

#include "scenetok/geometry.hpp"

#include <cstddef>
#include <vector>

namespace scenetok {

inline constexpr std::size_t kDefaultNeighborhood = 32;

struct SamplingStats {
    double points_per_view_std = 0.0;
    double views_per_neighborhood_mean = 0.0;
    double nn_distance_mean = 0.0;
    double nn_distance_std = 0.0;
    std::size_t k = kDefaultNeighborhood;
    std::size_t points = 0;
    std::size_t views = 0;
};

struct NeighborhoodViews {
    std::vector<std::size_t> counts;
    double mean = 0.0;
};

struct NearestDistances {
    std::vector<double> distances;
    double mean = 0.0;
    double std = 0.0;
};

// Population std of the per-view point counts over views 0..view_count-1,
// views without points included.
double points_per_view_std(const ViewedPointCloud& cloud, std::size_t view_count);

// Distinct view ids among each point's k nearest other points (3D distance,
// ties to the lowest index). Requires N > k.
NeighborhoodViews views_per_neighborhood(const ViewedPointCloud& cloud, std::size_t k = kDefaultNeighborhood);

// Distance from each point to its closest other point. Requires N >= 2.
NearestDistances nn_distance(const ViewedPointCloud& cloud);

SamplingStats compute_stats(const ViewedPointCloud& cloud, std::size_t view_count,
                            std::size_t k = kDefaultNeighborhood);

// Arithmetic mean and population standard deviation, summed in index order.
struct MeanStd {
    double mean;
    double std;
};
MeanStd mean_and_population_std(const std::vector<double>& values);

}  // namespace scenetok
