#include "akc/transitivity.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace akc;

namespace {

double max_gap(const SpherePoint& a, const SpherePoint& b)
{
    double m = 0;
    for (std::size_t k = 0; k < a.z.size(); ++k)
        m = std::max(m, std::abs(a.z[k] - b.z[k]));
    return m;
}

}  // namespace

TEST_CASE("two-coordinate solve reaches the requested moduli")
{
    auto pts = lebesgue_sample(2, 200, 31);
    Stream rng(4, 0);
    for (const auto& z : pts) {
        double mass = std::norm(z.z[0]) + std::norm(z.z[1]);
        double r1 = std::sqrt(mass) * rng.uniform();
        double rj = std::sqrt(mass - r1 * r1);
        auto [t, s] = solve_two_coord(z, 2, r1, rj);
        // tau_2^s xi_2^t z, recomputed from the matrix forms
        SpherePoint w = z;
        w.z[1] *= std::polar(1.0, 2 * std::numbers::pi * t);
        Complex e = std::polar(1.0, 2 * std::numbers::pi * s);
        Complex a = (e + 1.0) / 2.0, b = (e - 1.0) / 2.0;
        Complex u = a * w.z[0] + b * w.z[1], v = b * w.z[0] + a * w.z[1];
        CHECK(std::abs(std::abs(u) - r1) < 1e-8);
        CHECK(std::abs(std::abs(v) - rj) < 1e-8);
    }
}

TEST_CASE("two-coordinate solve: trivial target returns zero parameters")
{
    SpherePoint z({Complex(0.6, 0), Complex(0, 0.8)});
    auto [t, s] = solve_two_coord(z, 2, 0.6, 0.8);
    CHECK(t == 0.0);
    CHECK(s == 0.0);
    CHECK_THROWS_AS(solve_two_coord(z, 2, 0.9, 0.9), PreconditionError);
}

TEST_CASE("realize_moduli has 4d-4 moves and hits the moduli")
{
    for (int d : {2, 3, 4}) {
        auto pts = lebesgue_sample(d, 50, 40 + d);
        auto tgt = lebesgue_sample(d, 50, 90 + d);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            std::vector<double> rho;
            for (const auto& c : tgt[k].z)
                rho.push_back(std::abs(c));
            auto seq = realize_moduli(pts[k], rho);
            CHECK(seq.moves.size() == static_cast<std::size_t>(4 * d - 4));
            auto out = seq.apply(pts[k]);
            for (int j = 0; j < d; ++j)
                CHECK(std::abs(std::abs(out.z[j]) - rho[j]) < 1e-8);
        }
    }
}

TEST_CASE("realize_point reaches random targets at d=2 and d=3")
{
    for (int d : {2, 3}) {
        auto pts = lebesgue_sample(d, 200, 7 * d);
        auto tgt = lebesgue_sample(d, 200, 11 * d);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            auto seq = realize_point(pts[k], tgt[k]);
            CHECK(seq.moves.size() == static_cast<std::size_t>(5 * d - 3));
            CHECK(max_gap(seq.apply(pts[k]), tgt[k]) < 1e-6);
            // the chain form applies the same product
            SpherePoint c = pts[k];
            seq.chain().apply(std::span<Complex>(c.z));
            CHECK(max_gap(c, tgt[k]) < 1e-6);
        }
    }
}

TEST_CASE("realize_point edge cases")
{
    SpherePoint z({Complex(1, 0), Complex(0, 0)});
    SpherePoint anti({Complex(-1, 0), Complex(0, 0)});
    SpherePoint other({Complex(0, 0), Complex(0, -1)});
    CHECK(max_gap(realize_point(z, z).apply(z), z) < 1e-10);
    CHECK(max_gap(realize_point(z, anti).apply(z), anti) < 1e-6);
    CHECK(max_gap(realize_point(z, other).apply(z), other) < 1e-6);
    SpherePoint bad({Complex(1, 0), Complex(1, 0)});
    CHECK_THROWS_AS(realize_point(bad, z), PreconditionError);
}

TEST_CASE("dichotomy: eta value and case split")
{
    CHECK(start_eta(2) == doctest::Approx(1.0 / 64));
    std::vector<TwistMap> ladder;
    for (int l = 0; l <= 8; ++l) {
        bool tau = l % 2 == 1;
        ladder.push_back(tau ? TwistMap{Axis::tau(2), Invariant::chi(2, 2), 3.0}
                             : TwistMap{l == 0 ? Axis::xi(1) : Axis::xi(2),
                                        Invariant::psi(l == 0 ? 2 : 1, 2), 3.0});
    }
    SpherePoint big({Complex(0.6, 0), Complex(0.8, 0)});
    auto c1 = start_dichotomy(big, ladder);
    CHECK(c1.case1);
    CHECK(c1.margin > 0);
    SpherePoint small({Complex(0.001, 0), Complex(0, std::sqrt(1 - 1e-6))});
    auto c2 = start_dichotomy(small, ladder);
    CHECK_FALSE(c2.case1);
    CHECK(c2.j == 2);
    CHECK(c2.margin > 0);
    // |z_1 - z_2| after the last twist, from the moduli alone
    CHECK(std::abs(c2.z.z[0] - c2.z.z[1]) > start_eta(2));
}
