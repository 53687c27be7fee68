#include "akc/chain.hpp"
#include "akc/geometry.hpp"

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

TEST_CASE("rationals reduce mod 1 and parse")
{
    auto r = Rational::make(6, 4);
    CHECK(r.p == 1);
    CHECK(r.q == 2);
    CHECK(Rational::parse("3/4") == Rational::make(3, 4));
    CHECK(Rational::make(-1, 3) == Rational::make(2, 3));
    CHECK(Rational::make(3, 7).multiple(5) == 1);  // 15 mod 7
    CHECK(Rational::make(3, 7).multiple(-1) == 4);
    CHECK_THROWS_AS(Rational::parse("1/0"), PreconditionError);
    CHECK_THROWS_AS(Rational::parse("x"), PreconditionError);
}

TEST_CASE("rational_near meets the tolerance with small denominators")
{
    auto r = rational_near(0.5, 1e-3, 1000);
    CHECK(r == Rational::make(1, 2));
    auto pi = rational_near(std::numbers::pi - 3, 1e-6, 100000);
    CHECK(std::abs(pi.value() - (std::numbers::pi - 3)) < 1e-6);
    CHECK(pi.q == 113);
    CHECK_THROWS_AS(rational_near(std::numbers::sqrt2 - 1, 1e-12, 10), PreconditionError);
}

TEST_CASE("circle action on a basis vector")
{
    SpherePoint e1({Complex(1, 0), Complex(0, 0)});
    auto p = circle_action(0.25, e1);
    auto x = p.real_coords();
    CHECK(x[0] == doctest::Approx(0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1).epsilon(1e-15));
    CHECK(std::abs(x[2]) < 1e-15);
    CHECK(std::abs(x[3]) < 1e-15);
}

TEST_CASE("circle action group law and unitarity")
{
    for (int d : {2, 3}) {
        auto pts = lebesgue_sample(d, 200, 17 + d);
        Stream rng(5, d);
        for (const auto& z : pts) {
            double s = rng.uniform() * 4 - 2, t = rng.uniform() * 4 - 2;
            CHECK(max_gap(circle_action(1.0, z), z) < 1e-12);
            CHECK(max_gap(circle_action(s, circle_action(t, z)), circle_action(s + t, z)) < 1e-12);
            CHECK(circle_action(s, z).norm_defect() < 1e-12);
        }
    }
}

TEST_CASE("rational circle action is exactly periodic")
{
    auto z = lebesgue_sample(3, 1, 9)[0];
    auto a = Rational::make(5, 12);
    CHECK(max_gap(circle_action(a, 12, z), z) < 1e-15);
    CHECK(max_gap(circle_action(a, 7, z), circle_action(35.0 / 12.0, z)) < 1e-12);
}

TEST_CASE("complexified circle action agrees with the real action on real points")
{
    auto z = lebesgue_sample(2, 1, 3)[0];
    auto w = circle_action_complexified(Complex(0.3, 0), complexify(z));
    auto r = complexify(circle_action(0.3, z));
    CHECK(distance(w, r) < 1e-12);
    // imaginary time: the rotation matrix [[cos, -sin],[sin, cos]] with complex angle
    Complex t(0.1, 0.05);
    auto wc = circle_action_complexified(t, complexify(z));
    Complex c = std::cos(2 * std::numbers::pi * t), s = std::sin(2 * std::numbers::pi * t);
    auto x = z.real_coords();
    for (int k = 0; k < 2; ++k) {
        Complex a = c * x[2 * k] - s * x[2 * k + 1];
        Complex b = s * x[2 * k] + c * x[2 * k + 1];
        CHECK(std::abs(wc.w[2 * k] - a) < 1e-12);
        CHECK(std::abs(wc.w[2 * k + 1] - b) < 1e-12);
    }
}

TEST_CASE("lebesgue samples are unit, centered and nested")
{
    auto a = lebesgue_cloud(2, 20000, 42);
    auto b = lebesgue_cloud(2, 3000, 42);
    for (std::size_t i = 0; i < b.x.size(); ++i)
        REQUIRE(a.x[i] == b.x[i]);
    double mean[4] = {0, 0, 0, 0}, second = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double n = 0;
        for (int k = 0; k < 4; ++k) {
            mean[k] += a.at(i)[k];
            n += a.at(i)[k] * a.at(i)[k];
        }
        REQUIRE(std::abs(n - 1) < 1e-12);
        second += a.at(i)[0] * a.at(i)[0];
    }
    for (double m : mean)
        CHECK(std::abs(m / 20000) < 0.02);
    // E[x_1^2] = 1/4 on S^3
    CHECK(second / 20000 == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("ball samples stay inside B_Delta")
{
    for (auto norm : {BallNorm::Euclidean, BallNorm::Max}) {
        auto w = ball_sample(2, 1.05, 400, 7, norm);
        REQUIRE(w.size() == 400);
        bool some_complex = false;
        for (const auto& p : w) {
            if (norm == BallNorm::Euclidean)
                CHECK(p.norm() <= 1.05 + 1e-12);
            else
                CHECK(p.max_abs() <= 1.05 + 1e-12);
            for (const auto& c : p.w)
                some_complex = some_complex || std::abs(c.imag()) > 1e-3;
        }
        CHECK(some_complex);
    }
}

TEST_CASE("cone coordinates round trip")
{
    auto w = ball_sample(3, 1.0, 20, 11);
    for (const auto& p : w) {
        std::vector<Complex> u(3), v(3);
        to_cone(p, u, v);
        CHECK(distance(from_cone(u, v), p) < 1e-14);
    }
}

TEST_CASE("sampled distance of a map to itself is zero, to a rotation is not")
{
    ConjugatedRotation f{2, Chain{}, Rational::make(1, 3)};
    ConjugatedRotation g{2, Chain{}, Rational::make(1, 4)};
    std::vector<std::int64_t> one{1};
    auto same = sup_distance_powers(f, f, one, 1.05, 64, 3);
    CHECK(same.estimate == 0.0);
    auto diff = sup_distance_powers(f, g, one, 1.05, 64, 3);
    CHECK(diff.estimate > 0.1);
    CHECK_FALSE(diff.overflow());
}

TEST_CASE("closeness power set")
{
    auto p = closeness_powers(50, 100, 10, 1);
    CHECK(p.size() == 50);
    auto big = closeness_powers(100000, 100, 10, 1);
    CHECK(big.front() == 1);
    CHECK(big.back() == 100000);
    CHECK(big.size() <= 111);
    CHECK(big.size() >= 101);
}
