#pragma once

#include "akc/core.hpp"
#include "akc/geometry.hpp"
#include "akc/translations.hpp"

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace akc {

struct AxisMove {
    Axis axis;
    double s = 0.0;
};

using Factor = std::variant<AxisMove, TwistMap>;

// H = factors[0] o factors[1] o ... o factors[n-1]; the last factor acts first.
struct Chain {
    std::vector<Factor> factors;

    void validate(int d) const;
    bool apply(std::span<Complex> z) const;
    bool apply_inverse(std::span<Complex> z) const;
    bool apply(std::span<Complex> u, std::span<Complex> v) const;
    bool apply_inverse(std::span<Complex> u, std::span<Complex> v) const;

    Chain then(const Chain& inner) const;  // this o inner
};

// H o phi^alpha o H^{-1}, never expanded.
struct ConjugatedRotation {
    int d = 2;
    Chain h;
    Rational alpha;

    bool evaluate(std::span<Complex> z, std::int64_t power) const;
    Flagged<SpherePoint> evaluate(const SpherePoint& x, std::int64_t power) const;
    Flagged<ComplexifiedPoint> evaluate(const ComplexifiedPoint& w, std::int64_t power) const;
};

Flagged<SpherePoint> evaluate_chain(const ConjugatedRotation& f, const SpherePoint& x, std::int64_t power);

// f^m x for m = 1..length. Points that overflow are left as NaN.
PointCloud orbit(const ConjugatedRotation& f, const SpherePoint& x, std::int64_t length);
PointCloud orbit_serial(const ConjugatedRotation& f, const SpherePoint& x, std::int64_t length);

// Applies H to every point of a cloud.
PointCloud push_forward(const Chain& h, const PointCloud& in);

// f^i as a map on complexified points, with f^{-i} as its inverse.
struct PoweredMap {
    const ConjugatedRotation* f;
    std::int64_t power;

    ComplexifiedPoint forward(const ComplexifiedPoint& w, bool& ok) const;
    ComplexifiedPoint inverse(const ComplexifiedPoint& w, bool& ok) const;
};

// All 1..min(qmax, cap), plus `extra` random powers in (cap, qmax], plus qmax.
std::vector<std::int64_t> closeness_powers(std::int64_t qmax, std::int64_t cap, std::size_t extra,
                                           std::uint64_t seed);

// max over samples w and powers i of |f^i w - g^i w| and |f^-i w - g^-i w|.
// H^{-1} w is computed once per sample and reused for every power.
SupEstimate sup_distance_powers(const ConjugatedRotation& f, const ConjugatedRotation& g,
                                std::span<const std::int64_t> powers, double delta, std::size_t count,
                                std::uint64_t seed, BallNorm norm = BallNorm::Euclidean);

}  // namespace akc
