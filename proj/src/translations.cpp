#include "akc/translations.hpp"

#include "akc/kernels.hpp"
#include "akc/quad.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace akc {

namespace {

struct Cone {
    std::vector<Complex> u, v;
    explicit Cone(const ComplexifiedPoint& w) : u(w.dim()), v(w.dim()) { to_cone(w, u, v); }
    ComplexifiedPoint point() const { return from_cone(u, v); }
};

template <class C>
std::vector<C> lift(const SpherePoint& z)
{
    std::vector<C> out;
    out.reserve(z.z.size());
    for (const auto& c : z.z)
        out.emplace_back(C(c.real(), c.imag()));
    return out;
}

template <class C>
double gap(const std::vector<C>& a, const std::vector<C>& b)
{
    using std::sqrt;
    kern::real_t<C> s(0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        C e = a[k] - b[k];
        s += e.real() * e.real() + e.imag() * e.imag();
    }
    return static_cast<double>(sqrt(s));
}

template <class C>
double commutation_defect(const TwistMap& t, const Rational& alpha, const SpherePoint& z)
{
    auto a = lift<C>(z);
    auto b = a;
    kern::rotate<C>(a, alpha, 1);
    bool ok = kern::twist<C>(a, t, +1);
    ok = kern::twist<C>(b, t, +1) && ok;
    kern::rotate<C>(b, alpha, 1);
    if (!ok)
        return std::numeric_limits<double>::infinity();
    return gap(a, b);
}

template <class C>
double roundtrip(const TwistMap& t, const SpherePoint& z)
{
    auto a = lift<C>(z);
    auto b = a;
    bool ok = kern::twist<C>(b, t, +1);
    ok = ok && kern::twist<C>(b, t, -1);
    if (!ok)
        return std::numeric_limits<double>::infinity();
    return gap(a, b);
}

template <class R>
R determinant(std::vector<R> m, int n)
{
    using std::abs;
    R det(1);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (abs(m[r * n + c]) > abs(m[piv * n + c]))
                piv = r;
        if (m[piv * n + c] == R(0))
            return R(0);
        if (piv != c) {
            for (int k = 0; k < n; ++k)
                std::swap(m[c * n + k], m[piv * n + k]);
            det = -det;
        }
        det *= m[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            R f = m[r * n + c] / m[c * n + c];
            for (int k = c; k < n; ++k)
                m[r * n + k] -= f * m[c * n + k];
        }
    }
    return det;
}

}  // namespace

SpherePoint xi_apply(int i, double s, const SpherePoint& z)
{
    Axis::xi(i).validate(z.dim());
    SpherePoint out = z;
    kern::xi<Complex>(out.z, i, s);
    return out;
}

ComplexifiedPoint xi_apply(int i, Complex s, const ComplexifiedPoint& w)
{
    Axis::xi(i).validate(w.dim());
    Cone c(w);
    kern::xi<Complex>(c.u, c.v, i, s);
    return c.point();
}

SpherePoint tau_apply(int i, double s, const SpherePoint& z)
{
    Axis::tau(i).validate(z.dim());
    SpherePoint out = z;
    kern::tau<Complex>(out.z, i, s);
    return out;
}

ComplexifiedPoint tau_apply(int i, Complex s, const ComplexifiedPoint& w)
{
    Axis::tau(i).validate(w.dim());
    Cone c(w);
    kern::tau<Complex>(c.u, c.v, i, s);
    return c.point();
}

SpherePoint axis_apply(const Axis& axis, double s, const SpherePoint& z)
{
    axis.validate(z.dim());
    SpherePoint out = z;
    kern::move<Complex>(out.z, axis, s);
    return out;
}

ComplexifiedPoint axis_apply(const Axis& axis, Complex s, const ComplexifiedPoint& w)
{
    axis.validate(w.dim());
    Cone c(w);
    kern::move<Complex>(c.u, c.v, axis, s);
    return c.point();
}

Flagged<double> invariant_eval(const Invariant& fn, const SpherePoint& z)
{
    fn.validate(z.dim());
    double v = kern::invariant<Complex>(z.z, fn);
    return {v, !(std::abs(v) <= kOverflow)};
}

Flagged<Complex> invariant_eval(const Invariant& fn, const ComplexifiedPoint& w)
{
    fn.validate(w.dim());
    Cone c(w);
    Complex v = kern::invariant<Complex>(c.u, c.v, fn);
    return {v, !kern::finite_bounded(v)};
}

namespace {

template <class P>
Flagged<P> twist_real(const TwistMap& t, const P& z, int sign)
{
    t.validate(z.dim());
    Flagged<P> out{z, false};
    out.overflow = !kern::twist<Complex>(out.value.z, t, sign);
    return out;
}

Flagged<ComplexifiedPoint> twist_cone(const TwistMap& t, const ComplexifiedPoint& w, int sign)
{
    t.validate(w.dim());
    Cone c(w);
    bool ok = kern::twist<Complex>(c.u, c.v, t, sign);
    return {c.point(), !ok};
}

}  // namespace

Flagged<SpherePoint> twist_apply(const TwistMap& t, const SpherePoint& z)
{
    return twist_real(t, z, +1);
}

Flagged<ComplexifiedPoint> twist_apply(const TwistMap& t, const ComplexifiedPoint& w)
{
    return twist_cone(t, w, +1);
}

Flagged<SpherePoint> twist_invert(const TwistMap& t, const SpherePoint& z)
{
    return twist_real(t, z, -1);
}

Flagged<ComplexifiedPoint> twist_invert(const TwistMap& t, const ComplexifiedPoint& w)
{
    return twist_cone(t, w, -1);
}

double check_commutation(const TwistMap& t, const Rational& alpha, std::span<const SpherePoint> samples,
                         Precision prec)
{
    double worst = 0.0;
    for (const auto& z : samples) {
        t.validate(z.dim());
        double e = prec == Precision::Quad ? commutation_defect<QComplex>(t, alpha, z)
                                           : commutation_defect<Complex>(t, alpha, z);
        worst = std::max(worst, e);
    }
    return worst;
}

double twist_roundtrip_defect(const TwistMap& t, const SpherePoint& z, Precision prec)
{
    t.validate(z.dim());
    return prec == Precision::Quad ? roundtrip<QComplex>(t, z) : roundtrip<Complex>(t, z);
}

double twist_jacobian(const TwistMap& t, const SpherePoint& z)
{
    t.validate(z.dim());
    const int d = z.dim();
    const int n = 2 * d;
    std::vector<Quad> x(n);
    for (int k = 0; k < d; ++k) {
        x[2 * k] = z.z[k].real();
        x[2 * k + 1] = z.z[k].imag();
    }

    // orthonormal frame [x | E] by Gram-Schmidt against the coordinate axes
    std::vector<std::vector<Quad>> frame{x};
    for (int e = 0; e < n && static_cast<int>(frame.size()) < n; ++e) {
        std::vector<Quad> b(n, Quad(0));
        b[e] = 1;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& f : frame) {
                Quad dot(0);
                for (int k = 0; k < n; ++k)
                    dot += f[k] * b[k];
                for (int k = 0; k < n; ++k)
                    b[k] -= dot * f[k];
            }
        Quad nrm(0);
        for (int k = 0; k < n; ++k)
            nrm += b[k] * b[k];
        if (nrm < Quad(1e-6))
            continue;
        nrm = sqrt(nrm);
        for (int k = 0; k < n; ++k)
            b[k] /= nrm;
        frame.push_back(std::move(b));
    }

    const Quad h("1e-15");
    std::vector<Quad> in(n * n), out(n * n);
    auto image = lift<QComplex>(z);
    kern::twist<QComplex>(image, t, +1);
    for (int k = 0; k < d; ++k) {
        out[2 * k * n] = image[k].real();
        out[(2 * k + 1) * n] = image[k].imag();
    }
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r)
            in[r * n + c] = frame[c][r];

    const QComplex i(0, 1);
    for (int c = 1; c < n; ++c) {
        std::vector<QComplex> u(d), v(d);
        for (int k = 0; k < d; ++k) {
            QComplex a = QComplex(x[2 * k]) + QComplex(h * frame[c][2 * k]) * i;
            QComplex b = QComplex(x[2 * k + 1]) + QComplex(h * frame[c][2 * k + 1]) * i;
            u[k] = a + i * b;
            v[k] = a - i * b;
        }
        kern::twist<QComplex>(u, v, t, +1);
        for (int k = 0; k < d; ++k) {
            QComplex a = (u[k] + v[k]) / QComplex(2);
            QComplex b = (u[k] - v[k]) / (QComplex(2) * i);
            out[2 * k * n + c] = a.imag() / h;
            out[(2 * k + 1) * n + c] = b.imag() / h;
        }
    }
    Quad num = determinant(out, n);
    Quad den = determinant(in, n);
    return static_cast<double>(num / den);
}

}  // namespace akc
