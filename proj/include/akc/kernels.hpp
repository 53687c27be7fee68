#pragma once

// Map primitives, generic over the complex scalar so that the same code runs
// in double and in quad precision (see akc/quad.hpp).
//
// Two coordinate systems:
//   real path:  z in C^d, the sphere's own complex coordinates.
//   cone path:  (u, v) in C^d x C^d with u_k = w_{2k-1} + i w_{2k},
//               v_k = w_{2k-1} - i w_{2k}, w the complexified real coordinates.
//               On real points v = conj(u). Every primitive below is the
//               holomorphic extension of its real form in these variables.

#include "akc/core.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>

namespace akc::kern {

template <class C>
struct RealOf;
template <class T>
struct RealOf<std::complex<T>> {
    using type = T;
};
template <class C>
using real_t = typename RealOf<C>::type;

template <class R>
R two_pi()
{
    return R(2) * boost::math::constants::pi<R>();
}

// e^{2 pi i s} for real s, reduced mod 1 first
template <class C>
C unit_phase(real_t<C> s)
{
    using std::cos;
    using std::floor;
    using std::sin;
    using R = real_t<C>;
    R f = s - floor(s);
    R a = two_pi<R>() * f;
    return C(cos(a), sin(a));
}

// e^{2 pi i s} for complex s
template <class C>
C complex_phase(const C& s)
{
    using std::exp;
    using R = real_t<C>;
    R mag = exp(-two_pi<R>() * s.imag());
    return unit_phase<C>(s.real()) * mag;
}

template <class C>
C ipow(C base, std::int64_t n)
{
    C acc(1);
    while (n > 0) {
        if (n & 1)
            acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

template <class C>
bool finite_bounded(const C& c)
{
    using std::abs;
    using std::isfinite;
    using R = real_t<C>;
    R re = c.real();
    R im = c.imag();
    return isfinite(re) && isfinite(im) && abs(re) <= R(kOverflow) && abs(im) <= R(kOverflow);
}

// ---------------------------------------------------------------- real path

template <class C>
void rotate(std::span<C> z, real_t<C> t)
{
    C e = unit_phase<C>(t);
    for (auto& c : z)
        c *= e;
}

template <class C>
void rotate(std::span<C> z, const Rational& alpha, std::int64_t power)
{
    using R = real_t<C>;
    rotate(z, R(alpha.multiple(power)) / R(alpha.q));
}

template <class C>
void xi(std::span<C> z, int i, real_t<C> s)
{
    z[i - 1] *= unit_phase<C>(s);
}

template <class C>
void tau(std::span<C> z, int i, real_t<C> s)
{
    C e = unit_phase<C>(s);
    C a = (e + C(1)) / C(2);
    C b = (e - C(1)) / C(2);
    C z1 = z[0];
    C zi = z[i - 1];
    z[0] = a * z1 + b * zi;
    z[i - 1] = b * z1 + a * zi;
}

template <class C>
void move(std::span<C> z, const Axis& axis, real_t<C> s)
{
    switch (axis.type) {
    case AxisType::Circle:
        rotate(z, s);
        break;
    case AxisType::Xi:
        xi(z, axis.index, s);
        break;
    case AxisType::Tau:
        tau(z, axis.index, s);
        break;
    }
}

template <class C>
real_t<C> invariant(std::span<const C> z, const Invariant& fn)
{
    if (fn.type == InvariantType::Psi)
        return ipow(z[fn.index - 1], fn.degree).real();
    return ipow(C(z[0] - z[fn.index - 1]), fn.degree).real();
}

// sign = +1 applies the twist, -1 its inverse. False on overflow.
template <class C>
bool twist(std::span<C> z, const TwistMap& t, int sign)
{
    using std::abs;
    using std::isfinite;
    using R = real_t<C>;
    R v = invariant<C>(std::span<const C>(z.data(), z.size()), t.fn);
    if (!isfinite(v) || abs(v) > R(kOverflow))
        return false;
    move(z, t.axis, R(sign) * R(t.amplitude) * v);
    return true;
}

// ---------------------------------------------------------------- cone path

template <class C>
void rotate(std::span<C> u, std::span<C> v, const C& t)
{
    C e = complex_phase(t);
    C einv = complex_phase(C(-t));
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] *= e;
        v[k] *= einv;
    }
}

template <class C>
void xi(std::span<C> u, std::span<C> v, int i, const C& s)
{
    u[i - 1] *= complex_phase(s);
    v[i - 1] *= complex_phase(C(-s));
}

template <class C>
void tau(std::span<C> u, std::span<C> v, int i, const C& s)
{
    auto mix = [i](std::span<C> x, const C& e) {
        C a = (e + C(1)) / C(2);
        C b = (e - C(1)) / C(2);
        C x1 = x[0];
        C xi_ = x[i - 1];
        x[0] = a * x1 + b * xi_;
        x[i - 1] = b * x1 + a * xi_;
    };
    mix(u, complex_phase(s));
    mix(v, complex_phase(C(-s)));
}

template <class C>
void move(std::span<C> u, std::span<C> v, const Axis& axis, const C& s)
{
    switch (axis.type) {
    case AxisType::Circle:
        rotate(u, v, s);
        break;
    case AxisType::Xi:
        xi(u, v, axis.index, s);
        break;
    case AxisType::Tau:
        tau(u, v, axis.index, s);
        break;
    }
}

template <class C>
C invariant(std::span<const C> u, std::span<const C> v, const Invariant& fn)
{
    int j = fn.index - 1;
    if (fn.type == InvariantType::Psi)
        return (ipow(u[j], fn.degree) + ipow(v[j], fn.degree)) / C(2);
    return (ipow(C(u[0] - u[j]), fn.degree) + ipow(C(v[0] - v[j]), fn.degree)) / C(2);
}

template <class C>
bool bounded(std::span<const C> u, std::span<const C> v)
{
    for (std::size_t k = 0; k < u.size(); ++k)
        if (!finite_bounded(u[k]) || !finite_bounded(v[k]))
            return false;
    return true;
}

template <class C>
bool twist(std::span<C> u, std::span<C> v, const TwistMap& t, int sign)
{
    using std::abs;
    using R = real_t<C>;
    C val = invariant<C>(std::span<const C>(u.data(), u.size()),
                         std::span<const C>(v.data(), v.size()), t.fn);
    if (!finite_bounded(val))
        return false;
    C s = val * (R(sign) * R(t.amplitude));
    // |e^{2 pi i s}| = e^{-2 pi Im s}; refuse anything past the overflow scale
    if (abs(two_pi<R>() * s.imag()) > R(230))
        return false;
    move(u, v, t.axis, s);
    return bounded<C>(std::span<const C>(u.data(), u.size()),
                      std::span<const C>(v.data(), v.size()));
}

}  // namespace akc::kern
