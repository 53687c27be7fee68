#pragma once

#include "akc/core.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace akc {

// Unit vector in C^d, z_k = x_{2k-1} + i x_{2k}.
struct SpherePoint {
    std::vector<Complex> z;

    SpherePoint() = default;
    explicit SpherePoint(std::vector<Complex> coords) : z(std::move(coords)) {}

    int dim() const { return static_cast<int>(z.size()); }
    double norm_defect() const;  // | sum |z_k|^2 - 1 |
    void require_unit(double tol = 1e-12) const;
    std::vector<double> real_coords() const;
    static SpherePoint from_real(std::span<const double> x);
};

// Complexified real coordinates w_1..w_{2d}.
struct ComplexifiedPoint {
    std::vector<Complex> w;

    int dim() const { return static_cast<int>(w.size() / 2); }
    double norm() const;
    double max_abs() const;
    bool overflowed() const;
};

ComplexifiedPoint complexify(const SpherePoint& p);

// Light-cone pair (u, v) of a complexified point, and back.
void to_cone(const ComplexifiedPoint& p, std::span<Complex> u, std::span<Complex> v);
ComplexifiedPoint from_cone(std::span<const Complex> u, std::span<const Complex> v);

SpherePoint circle_action(double t, const SpherePoint& z);
SpherePoint circle_action(const Rational& alpha, std::int64_t power, const SpherePoint& z);
ComplexifiedPoint circle_action_complexified(Complex t, const ComplexifiedPoint& w);

double distance(const SpherePoint& a, const SpherePoint& b);
double distance(const ComplexifiedPoint& a, const ComplexifiedPoint& b);

// Deterministic substreams: stream k of seed s is independent of how many
// other streams were drawn, which is what makes sample sets nested.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream);
    double uniform();  // [0,1)
    double normal();
    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline constexpr std::size_t kChunk = 1024;

// Flat array of real coordinates, dim = 2d values per point.
struct PointCloud {
    int dim = 0;
    std::vector<double> x;

    std::size_t size() const { return dim == 0 ? 0 : x.size() / static_cast<std::size_t>(dim); }
    const double* at(std::size_t i) const { return x.data() + i * static_cast<std::size_t>(dim); }
    double* at(std::size_t i) { return x.data() + i * static_cast<std::size_t>(dim); }
    void push(std::span<const Complex> z);
    SpherePoint point(std::size_t i) const;
};

std::vector<SpherePoint> lebesgue_sample(int d, std::size_t count, std::uint64_t seed);
PointCloud lebesgue_cloud(int d, std::size_t count, std::uint64_t seed);

enum class BallNorm { Euclidean, Max };

std::vector<ComplexifiedPoint> ball_sample(int d, double delta, std::size_t count, std::uint64_t seed,
                                           BallNorm norm = BallNorm::Euclidean);

struct SupEstimate {
    double estimate = 0.0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::size_t overflow_count = 0;
    bool overflow() const { return overflow_count > 0; }
};

// F and G expose forward/inverse(const ComplexifiedPoint&, bool& ok).
template <class F, class G>
SupEstimate sup_distance(const F& f, const G& g, int d, double delta, std::size_t count,
                         std::uint64_t seed, BallNorm norm = BallNorm::Euclidean)
{
    auto samples = ball_sample(d, delta, count, seed, norm);
    SupEstimate out;
    out.count = count;
    out.seed = seed;
    std::vector<double> dist(samples.size(), 0.0);
    std::vector<char> over(samples.size(), 0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(samples.size()); ++k) {
        const auto& w = samples[static_cast<std::size_t>(k)];
        bool ok = true;
        auto a = f.forward(w, ok);
        auto b = g.forward(w, ok);
        auto ai = f.inverse(w, ok);
        auto bi = g.inverse(w, ok);
        if (!ok) {
            over[static_cast<std::size_t>(k)] = 1;
            continue;
        }
        dist[static_cast<std::size_t>(k)] = std::max(distance(a, b), distance(ai, bi));
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (over[k])
            ++out.overflow_count;
        else
            out.estimate = std::max(out.estimate, dist[k]);
    }
    return out;
}

}  // namespace akc
