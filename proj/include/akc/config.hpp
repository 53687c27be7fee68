#pragma once

#include "akc/core.hpp"
#include "akc/geometry.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace akc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Eps0Policy { Desk, Paper };
enum class ClosenessPolicy { Record, Enforce };

struct RunConfig {
    int d = 2;
    std::string t0 = "0.5";  // decimal or p/q
    double epsilon = 0.5;
    double delta = 1.05;
    int outer_stages = 1;
    std::int64_t power_cap = 10000;
    std::int64_t power_extra = 100;
    std::int64_t denominator_cap = 10000000;
    double amplitude_cap = 1e6;
    std::int64_t degree_cap = 10000;
    std::uint64_t seed = 1;
    Eps0Policy eps0_policy = Eps0Policy::Desk;
    BallNorm ball_norm = BallNorm::Euclidean;
    ClosenessPolicy closeness_policy = ClosenessPolicy::Record;
    std::int64_t closeness_samples = 256;
    double dist_eps = 0.1;
    double dist_tighten = 0.5;
    double ud_radius = 0.25;
    double cud_eps = 0.3;
    std::int64_t nballs = 200;
    std::int64_t search_orbit_len = 65536;
    std::int64_t reference_points = 200000;
    double transversal_C = 10;
    std::int64_t transversal_samples = 4096;
    std::int64_t ensemble_size = 64;
    std::int64_t cud_min_prefix = 1024;

    void validate() const;
    double eps0(double eps) const;  // eps^100 or eps/10
    double t0_value() const;

    std::map<std::string, std::string> to_map() const;
    std::string canonical() const;  // sorted key=value lines
    std::string hash() const;       // sha256 hex of canonical()
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& data);

}  // namespace akc
