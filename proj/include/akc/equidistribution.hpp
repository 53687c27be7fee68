#pragma once

#include "akc/balls.hpp"
#include "akc/core.hpp"
#include "akc/geometry.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace akc {

struct BallStat {
    std::vector<double> center;
    double radius = 0;
    double observed = 0;  // orbit fraction
    double expected = 0;  // reference fraction or Lebesgue measure
    double allowance = 0; // Monte Carlo slack (UD) or standard error (CUD)
    bool ok = true;
};

struct DistributionReport {
    std::string test;  // "cud", "ud_along"
    double C = 0;
    double eps = 0;
    std::vector<Axis> dirs;
    bool pass = false;
    bool inconclusive = false;
    BallStat worst;
    double worst_ratio = 0;  // CUD: max(obs/exp, exp/obs); UD: |obs-exp| / band
    std::size_t orbit_count = 0;
    std::size_t reference_count = 0;
    std::size_t nballs = 0;
    std::uint64_t seed = 0;
    std::vector<BallStat> balls;
};

// Uniform reference for ball measures. Cached in memory per d, and on disk
// under $AKC_CACHE_DIR when set.
std::size_t lebesgue_reference_size(int d);
std::shared_ptr<const SortedCloud> lebesgue_reference(int d);

DistributionReport test_CUD(const PointCloud& orbit, double C, double eps, std::size_t nballs,
                            std::uint64_t seed);

// {dirs[0]^{t_0} ... dirs[L]^{t_L} y} with uniform parameters; dirs[0] is phi.
PointCloud reference_cloud(const SpherePoint& y, std::span<const Axis> dirs, std::size_t count,
                           std::uint64_t seed);

// Two-sided z for `nballs` simultaneous comparisons at total level 1e-3.
double bonferroni_z(std::size_t nballs);

DistributionReport test_UD_along(const PointCloud& orbit, const SpherePoint& y, std::span<const Axis> dirs,
                                 double eps, std::size_t nballs, std::uint64_t seed,
                                 std::size_t reference_count = 200000, double radius = 0.25);

// Same comparison against a prepared reference. Balls have radius `radius` in
// X; eps is the relative band (1 +- eps).
DistributionReport test_UD_against(const PointCloud& orbit, const SortedCloud& reference,
                                   const PointCloud& reference_raw, double eps, std::size_t nballs,
                                   std::uint64_t seed, double radius = 0.25);

struct TransversalIndex {
    int m = 1;
    int pair = 0;  // nonzero: pair variant |w_pair - w_m| < nu only
};

struct TransversalReport {
    TransversalIndex index;
    std::vector<Axis> dirs;
    double nu = 0;
    double C = 0;
    bool pass = false;
    double worst_measure = 0;  // largest estimated bad-set measure
    int worst_i = 0;
    int worst_lambda = 0;
    std::size_t nsamples = 0;
    std::uint64_t seed = 0;
};

TransversalReport test_transversal(const SpherePoint& z, TransversalIndex m, std::span<const Axis> dirs,
                                   double nu, double C, std::size_t nsamples, std::uint64_t seed);

}  // namespace akc
