#pragma once

#include "akc/geometry.hpp"

#include <cstddef>
#include <vector>

namespace akc {

// Points sorted by their first real coordinate so a ball query only scans the
// slab |x_1 - c_1| < r. Non-finite points are dropped.
struct SortedCloud {
    int dim = 0;
    std::vector<double> x;
    std::vector<double> key;

    std::size_t size() const { return key.size(); }
};

SortedCloud sort_cloud(const PointCloud& cloud);

// counts[b] = #{p : |p - centers[b]| < radius}
std::vector<std::size_t> count_in_balls(const SortedCloud& cloud, const PointCloud& centers, double radius);

// Brute-force reference for the above.
std::vector<std::size_t> count_in_balls_serial(const PointCloud& cloud, const PointCloud& centers,
                                               double radius);

// Distance from each query to its nearest cloud point.
std::vector<double> nearest_distance(const SortedCloud& cloud, const PointCloud& queries);

}  // namespace akc
