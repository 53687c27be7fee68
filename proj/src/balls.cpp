#include "akc/balls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace akc {

SortedCloud sort_cloud(const PointCloud& cloud)
{
    const int n = cloud.dim;
    std::vector<std::size_t> idx;
    idx.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double* p = cloud.at(i);
        if (std::all_of(p, p + n, [](double v) { return std::isfinite(v); }))
            idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return cloud.at(a)[0] < cloud.at(b)[0]; });
    SortedCloud out;
    out.dim = n;
    out.x.resize(idx.size() * n);
    out.key.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double* p = cloud.at(idx[k]);
        std::copy(p, p + n, out.x.begin() + static_cast<std::ptrdiff_t>(k * n));
        out.key[k] = p[0];
    }
    return out;
}

namespace {

std::size_t count_one(const SortedCloud& cloud, const double* c, double r)
{
    const int n = cloud.dim;
    const double r2 = r * r;
    auto lo = std::lower_bound(cloud.key.begin(), cloud.key.end(), c[0] - r) - cloud.key.begin();
    auto hi = std::upper_bound(cloud.key.begin(), cloud.key.end(), c[0] + r) - cloud.key.begin();
    std::size_t hits = 0;
    for (auto i = lo; i < hi; ++i) {
        const double* p = cloud.x.data() + i * n;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            double e = p[k] - c[k];
            s += e * e;
        }
        hits += s < r2;
    }
    return hits;
}

}  // namespace

std::vector<std::size_t> count_in_balls(const SortedCloud& cloud, const PointCloud& centers, double radius)
{
    std::vector<std::size_t> out(centers.size(), 0);
    auto nb = static_cast<std::ptrdiff_t>(centers.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t b = 0; b < nb; ++b)
        out[static_cast<std::size_t>(b)] = count_one(cloud, centers.at(static_cast<std::size_t>(b)), radius);
    return out;
}

std::vector<std::size_t> count_in_balls_serial(const PointCloud& cloud, const PointCloud& centers,
                                               double radius)
{
    const int n = cloud.dim;
    const double r2 = radius * radius;
    std::vector<std::size_t> out(centers.size(), 0);
    for (std::size_t b = 0; b < centers.size(); ++b) {
        const double* c = centers.at(b);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double* p = cloud.at(i);
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                double e = p[k] - c[k];
                s += e * e;
            }
            out[b] += s < r2;
        }
    }
    return out;
}

std::vector<double> nearest_distance(const SortedCloud& cloud, const PointCloud& queries)
{
    const int n = cloud.dim;
    std::vector<double> out(queries.size(), std::numeric_limits<double>::infinity());
    auto nq = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t q = 0; q < nq; ++q) {
        const double* c = queries.at(static_cast<std::size_t>(q));
        if (!std::isfinite(c[0]) || cloud.size() == 0)
            continue;
        auto start = std::lower_bound(cloud.key.begin(), cloud.key.end(), c[0]) - cloud.key.begin();
        double best2 = std::numeric_limits<double>::infinity();
        auto probe = [&](std::ptrdiff_t i) {
            const double* p = cloud.x.data() + i * n;
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                double e = p[k] - c[k];
                s += e * e;
            }
            best2 = std::min(best2, s);
        };
        // walk outward until the slab gap exceeds the best distance
        auto total = static_cast<std::ptrdiff_t>(cloud.size());
        for (std::ptrdiff_t i = start; i < total; ++i) {
            double g = cloud.key[i] - c[0];
            if (g * g >= best2)
                break;
            probe(i);
        }
        for (std::ptrdiff_t i = start - 1; i >= 0; --i) {
            double g = c[0] - cloud.key[i];
            if (g * g >= best2)
                break;
            probe(i);
        }
        out[static_cast<std::size_t>(q)] = std::sqrt(best2);
    }
    return out;
}

}  // namespace akc
