#include "akc/translations.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace akc;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double max_gap(const SpherePoint& a, const SpherePoint& b)
{
    double m = 0;
    for (std::size_t k = 0; k < a.z.size(); ++k)
        m = std::max(m, std::abs(a.z[k] - b.z[k]));
    return m;
}

// tau_i^s as U diag(e^{2 pi i s}, 1) U^* on span(e_1, e_i), U = [[1,1],[1,-1]]/sqrt 2
SpherePoint tau_oracle(int i, double s, const SpherePoint& z)
{
    Complex e = std::polar(1.0, kTwoPi * s);
    double r = std::numbers::sqrt2 / 2;
    Complex a = r * (z.z[0] + z.z[i - 1]);  // coefficient on (1,1)/sqrt2
    Complex b = r * (z.z[0] - z.z[i - 1]);  // coefficient on (1,-1)/sqrt2
    SpherePoint out = z;
    out.z[0] = r * (e * a + b);
    out.z[i - 1] = r * (e * a - b);
    return out;
}

// real rotation of the pair (x, y) by a complex angle
void rot(Complex& x, Complex& y, Complex s)
{
    Complex c = std::cos(kTwoPi * s), n = std::sin(kTwoPi * s);
    Complex a = c * x - n * y, b = n * x + c * y;
    x = a;
    y = b;
}

}  // namespace

TEST_CASE("axis and invariant names round trip")
{
    for (auto a : {Axis::circle(), Axis::xi(3), Axis::tau(2)})
        CHECK(Axis::parse(a.str()) == a);
    CHECK(Axis::xi(2).str() == "xi2");
    for (auto f : {Invariant::psi(1, 7), Invariant::chi(3, 2)})
        CHECK(Invariant::parse(f.str()) == f);
    CHECK_THROWS_AS(Axis::parse("rho1"), PreconditionError);
    CHECK_THROWS_AS(Axis::tau(1).validate(3), PreconditionError);
    CHECK_THROWS_AS(Axis::xi(4).validate(3), PreconditionError);
}

TEST_CASE("twist pairing rules")
{
    CHECK_NOTHROW((TwistMap{Axis::xi(1), Invariant::psi(2, 3), 1.0}).validate(2));
    CHECK_THROWS_AS((TwistMap{Axis::xi(1), Invariant::psi(1, 3), 1.0}).validate(2), PreconditionError);
    CHECK_NOTHROW((TwistMap{Axis::tau(2), Invariant::chi(2, 3), 1.0}).validate(2));
    CHECK_THROWS_AS((TwistMap{Axis::tau(2), Invariant::chi(3, 3), 1.0}).validate(3), PreconditionError);
    CHECK_THROWS_AS((TwistMap{Axis::tau(2), Invariant::psi(1, 3), 1.0}).validate(2), PreconditionError);
}

TEST_CASE("xi and tau match their matrix forms")
{
    auto pts = lebesgue_sample(3, 100, 21);
    Stream rng(1, 0);
    for (const auto& z : pts) {
        double s = rng.uniform() * 3 - 1.5;
        auto x = xi_apply(2, s, z);
        SpherePoint ref = z;
        ref.z[1] *= std::polar(1.0, kTwoPi * s);
        CHECK(max_gap(x, ref) < 1e-13);
        CHECK(max_gap(tau_apply(3, s, z), tau_oracle(3, s, z)) < 1e-13);
    }
}

TEST_CASE("group law, period one and unitarity for every axis")
{
    for (int d : {2, 3}) {
        auto pts = lebesgue_sample(d, 300, 100 + d);
        Stream rng(2, d);
        std::vector<Axis> axes{Axis::circle()};
        for (int i = 1; i <= d; ++i)
            axes.push_back(Axis::xi(i));
        for (int i = 2; i <= d; ++i)
            axes.push_back(Axis::tau(i));
        for (const auto& z : pts)
            for (const auto& a : axes) {
                double s = rng.uniform() * 4 - 2, t = rng.uniform() * 4 - 2;
                CHECK(max_gap(axis_apply(a, 1.0, z), z) < 1e-12);
                CHECK(max_gap(axis_apply(a, s, axis_apply(a, t, z)), axis_apply(a, s + t, z)) < 1e-12);
                CHECK(axis_apply(a, s, z).norm_defect() < 1e-12);
            }
    }
}

TEST_CASE("complexified moves follow the real-coordinate rotation form")
{
    auto w = ball_sample(2, 1.05, 50, 8);
    Complex s(0.17, -0.04);
    for (const auto& p : w) {
        auto out = xi_apply(2, s, p);
        ComplexifiedPoint ref = p;
        rot(ref.w[2], ref.w[3], s);
        CHECK(distance(out, ref) < 1e-12);

        // tau_2: rotate the (1,1)-eigen component in its own real plane
        auto t = tau_apply(2, s, p);
        double r = std::numbers::sqrt2 / 2;
        Complex ax = r * (p.w[0] + p.w[2]), ay = r * (p.w[1] + p.w[3]);
        Complex bx = r * (p.w[0] - p.w[2]), by = r * (p.w[1] - p.w[3]);
        rot(ax, ay, s);
        ComplexifiedPoint tr = p;
        tr.w[0] = r * (ax + bx);
        tr.w[1] = r * (ay + by);
        tr.w[2] = r * (ax - bx);
        tr.w[3] = r * (ay - by);
        CHECK(distance(t, tr) < 1e-12);
    }
}

TEST_CASE("complexified twist agrees with the real twist on real points")
{
    TwistMap t{Axis::tau(2), Invariant::chi(2, 3), 7.5};
    for (const auto& z : lebesgue_sample(2, 50, 4)) {
        auto a = twist_apply(t, z);
        auto b = twist_apply(t, complexify(z));
        REQUIRE_FALSE(a.overflow);
        REQUIRE_FALSE(b.overflow);
        CHECK(distance(complexify(a.value), b.value) < 1e-12);
    }
}

TEST_CASE("invariants are constant along their axis and under phi^{p/q}")
{
    auto pts = lebesgue_sample(3, 200, 77);
    Stream rng(3, 0);
    for (const auto& z : pts) {
        double s = rng.uniform();
        auto psi = Invariant::psi(1, 5);
        CHECK(std::abs(invariant_eval(psi, xi_apply(2, s, z)).value - invariant_eval(psi, z).value) < 1e-12);
        auto chi = Invariant::chi(3, 4);
        CHECK(std::abs(invariant_eval(chi, tau_apply(3, s, z)).value - invariant_eval(chi, z).value) < 1e-12);
        // Re(z_1^5) from the polar form
        double r = std::abs(z.z[0]), th = std::arg(z.z[0]);
        CHECK(invariant_eval(psi, z).value == doctest::Approx(std::pow(r, 5) * std::cos(5 * th)).epsilon(1e-12));
        auto rot = circle_action(Rational::make(2, 5), 1, z);
        CHECK(std::abs(invariant_eval(psi, rot).value - invariant_eval(psi, z).value) < 1e-12);
    }
}

TEST_CASE("twists commute with the matching rational rotation")
{
    auto pts = lebesgue_sample(2, 64, 5);
    TwistMap xi{Axis::xi(1), Invariant::psi(2, 7), 300.0};
    TwistMap tau{Axis::tau(2), Invariant::chi(2, 7), 300.0};
    CHECK(check_commutation(xi, Rational::make(3, 7), pts) < 1e-10);
    CHECK(check_commutation(tau, Rational::make(3, 7), pts) < 1e-10);
    // mismatched degree: the invariant is not preserved
    TwistMap bad{Axis::tau(2), Invariant::chi(2, 6), 300.0};
    CHECK(check_commutation(bad, Rational::make(3, 7), pts) > 1e-3);
}

TEST_CASE("twist inverse and volume")
{
    auto pts = lebesgue_sample(2, 32, 6);
    TwistMap t{Axis::tau(2), Invariant::chi(2, 9), 900.0};
    for (const auto& z : pts) {
        CHECK(twist_roundtrip_defect(t, z) < 1e-10);
        CHECK(std::abs(std::abs(twist_jacobian(t, z)) - 1.0) < 1e-6);
    }
}

TEST_CASE("jacobian matches central differences for a mild twist")
{
    // independent check: finite differences in double on a tangent frame
    TwistMap t{Axis::xi(1), Invariant::psi(2, 3), 0.7};
    for (const auto& z : lebesgue_sample(2, 8, 9)) {
        auto x = z.real_coords();
        // tangent frame: i z, then Gram-Schmidt of e_k against x and previous vectors
        std::vector<std::vector<double>> frame{x};
        for (int k = 0; k < 4 && frame.size() < 4; ++k) {
            std::vector<double> v(4, 0.0);
            v[k] = 1;
            for (const auto& f : frame) {
                double dot = 0;
                for (int m = 0; m < 4; ++m)
                    dot += v[m] * f[m];
                for (int m = 0; m < 4; ++m)
                    v[m] -= dot * f[m];
            }
            double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
            if (n < 1e-3)
                continue;
            for (double& c : v)
                c /= n;
            frame.push_back(v);
        }
        REQUIRE(frame.size() == 4);
        auto F = [&](const std::vector<double>& p) {
            auto img = twist_apply(t, SpherePoint::from_real(p));
            return img.value.real_coords();
        };
        auto fx = F(x);
        // columns: F(x) and directional derivatives along the tangent frame
        double M[4][4];
        for (int m = 0; m < 4; ++m)
            M[m][0] = fx[m];
        const double h = 1e-6;
        for (int c = 1; c < 4; ++c) {
            std::vector<double> p(4), q(4);
            for (int m = 0; m < 4; ++m) {
                p[m] = x[m] + h * frame[c][m];
                q[m] = x[m] - h * frame[c][m];
            }
            auto a = F(p), b = F(q);
            for (int m = 0; m < 4; ++m)
                M[m][c] = (a[m] - b[m]) / (2 * h);
        }
        // det M / det [x | E]
        auto det4 = [](double A[4][4]) {
            double B[4][4];
            std::copy(&A[0][0], &A[0][0] + 16, &B[0][0]);
            double det = 1;
            for (int c = 0; c < 4; ++c) {
                int piv = c;
                for (int r = c + 1; r < 4; ++r)
                    if (std::abs(B[r][c]) > std::abs(B[piv][c]))
                        piv = r;
                if (piv != c) {
                    for (int k = 0; k < 4; ++k)
                        std::swap(B[c][k], B[piv][k]);
                    det = -det;
                }
                det *= B[c][c];
                for (int r = c + 1; r < 4; ++r) {
                    double f = B[r][c] / B[c][c];
                    for (int k = c; k < 4; ++k)
                        B[r][k] -= f * B[c][k];
                }
            }
            return det;
        };
        double E[4][4];
        for (int m = 0; m < 4; ++m)
            for (int c = 0; c < 4; ++c)
                E[m][c] = frame[c][m];
        double fd = det4(M) / det4(E);
        CHECK(fd == doctest::Approx(twist_jacobian(t, z)).epsilon(1e-6));
    }
}

TEST_CASE("overflow is flagged, not propagated")
{
    TwistMap t{Axis::tau(2), Invariant::chi(2, 400), 1e3};
    ComplexifiedPoint w;
    w.w = {Complex(3, 2), Complex(-3, 1), Complex(0, 0), Complex(0.5, 0)};
    auto r = twist_apply(t, w);
    CHECK(r.overflow);
}
