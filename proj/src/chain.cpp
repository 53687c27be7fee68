#include "akc/chain.hpp"

#include "akc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace akc {

void Chain::validate(int d) const
{
    for (const auto& f : factors) {
        if (const auto* m = std::get_if<AxisMove>(&f))
            m->axis.validate(d);
        else
            std::get<TwistMap>(f).validate(d);
    }
}

namespace {

bool step(const Factor& f, std::span<Complex> z, int sign)
{
    if (const auto* m = std::get_if<AxisMove>(&f)) {
        kern::move<Complex>(z, m->axis, sign * m->s);
        return true;
    }
    return kern::twist<Complex>(z, std::get<TwistMap>(f), sign);
}

bool step(const Factor& f, std::span<Complex> u, std::span<Complex> v, int sign)
{
    if (const auto* m = std::get_if<AxisMove>(&f)) {
        kern::move<Complex>(u, v, m->axis, Complex(sign * m->s));
        return true;
    }
    return kern::twist<Complex>(u, v, std::get<TwistMap>(f), sign);
}

}  // namespace

bool Chain::apply(std::span<Complex> z) const
{
    for (auto it = factors.rbegin(); it != factors.rend(); ++it)
        if (!step(*it, z, +1))
            return false;
    return true;
}

bool Chain::apply_inverse(std::span<Complex> z) const
{
    for (const auto& f : factors)
        if (!step(f, z, -1))
            return false;
    return true;
}

bool Chain::apply(std::span<Complex> u, std::span<Complex> v) const
{
    for (auto it = factors.rbegin(); it != factors.rend(); ++it)
        if (!step(*it, u, v, +1))
            return false;
    return true;
}

bool Chain::apply_inverse(std::span<Complex> u, std::span<Complex> v) const
{
    for (const auto& f : factors)
        if (!step(f, u, v, -1))
            return false;
    return true;
}

Chain Chain::then(const Chain& inner) const
{
    Chain out = *this;
    out.factors.insert(out.factors.end(), inner.factors.begin(), inner.factors.end());
    return out;
}

bool ConjugatedRotation::evaluate(std::span<Complex> z, std::int64_t power) const
{
    if (!h.apply_inverse(z))
        return false;
    kern::rotate<Complex>(z, alpha, power);
    return h.apply(z);
}

Flagged<SpherePoint> ConjugatedRotation::evaluate(const SpherePoint& x, std::int64_t power) const
{
    Flagged<SpherePoint> out{x, false};
    out.overflow = !evaluate(std::span<Complex>(out.value.z), power);
    return out;
}

Flagged<ComplexifiedPoint> ConjugatedRotation::evaluate(const ComplexifiedPoint& w, std::int64_t power) const
{
    int n = w.dim();
    std::vector<Complex> u(n), v(n);
    to_cone(w, u, v);
    bool ok = h.apply_inverse(u, v);
    if (ok) {
        Complex t(static_cast<double>(alpha.multiple(power)) / static_cast<double>(alpha.q), 0.0);
        kern::rotate<Complex>(std::span<Complex>(u), std::span<Complex>(v), t);
        ok = h.apply(u, v);
    }
    return {from_cone(u, v), !ok};
}

Flagged<SpherePoint> evaluate_chain(const ConjugatedRotation& f, const SpherePoint& x, std::int64_t power)
{
    x.require_unit(1e-9);
    return f.evaluate(x, power);
}

namespace {

void orbit_point(const ConjugatedRotation& f, std::span<const Complex> y, std::int64_t m, double* out)
{
    std::vector<Complex> z(y.begin(), y.end());
    kern::rotate<Complex>(std::span<Complex>(z), f.alpha, m);
    bool ok = f.h.apply(z);
    for (std::size_t k = 0; k < z.size(); ++k) {
        out[2 * k] = ok ? z[k].real() : std::numeric_limits<double>::quiet_NaN();
        out[2 * k + 1] = ok ? z[k].imag() : std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

PointCloud orbit(const ConjugatedRotation& f, const SpherePoint& x, std::int64_t length)
{
    PointCloud out;
    out.dim = 2 * x.dim();
    out.x.resize(static_cast<std::size_t>(length) * out.dim);
    std::vector<Complex> y = x.z;
    if (!f.h.apply_inverse(y)) {
        std::fill(out.x.begin(), out.x.end(), std::numeric_limits<double>::quiet_NaN());
        return out;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 1; m <= length; ++m)
        orbit_point(f, y, m, out.at(static_cast<std::size_t>(m - 1)));
    return out;
}

PointCloud orbit_serial(const ConjugatedRotation& f, const SpherePoint& x, std::int64_t length)
{
    PointCloud out;
    out.dim = 2 * x.dim();
    out.x.resize(static_cast<std::size_t>(length) * out.dim);
    std::vector<Complex> y = x.z;
    if (!f.h.apply_inverse(y)) {
        std::fill(out.x.begin(), out.x.end(), std::numeric_limits<double>::quiet_NaN());
        return out;
    }
    for (std::int64_t m = 1; m <= length; ++m)
        orbit_point(f, y, m, out.at(static_cast<std::size_t>(m - 1)));
    return out;
}

PointCloud push_forward(const Chain& h, const PointCloud& in)
{
    PointCloud out = in;
    const int d = in.dim / 2;
    auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double* p = out.at(static_cast<std::size_t>(i));
        std::vector<Complex> z(d);
        for (int k = 0; k < d; ++k)
            z[k] = Complex(p[2 * k], p[2 * k + 1]);
        bool ok = h.apply(z);
        for (int k = 0; k < d; ++k) {
            p[2 * k] = ok ? z[k].real() : std::numeric_limits<double>::quiet_NaN();
            p[2 * k + 1] = ok ? z[k].imag() : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

ComplexifiedPoint PoweredMap::forward(const ComplexifiedPoint& w, bool& ok) const
{
    auto r = f->evaluate(w, power);
    ok = ok && !r.overflow;
    return r.value;
}

ComplexifiedPoint PoweredMap::inverse(const ComplexifiedPoint& w, bool& ok) const
{
    auto r = f->evaluate(w, -power);
    ok = ok && !r.overflow;
    return r.value;
}

std::vector<std::int64_t> closeness_powers(std::int64_t qmax, std::int64_t cap, std::size_t extra,
                                           std::uint64_t seed)
{
    std::vector<std::int64_t> out;
    std::int64_t top = std::min(qmax, cap);
    for (std::int64_t i = 1; i <= top; ++i)
        out.push_back(i);
    if (qmax > cap) {
        Stream rng(seed, 0);
        auto span = static_cast<std::uint64_t>(qmax - cap);
        for (std::size_t k = 0; k < extra; ++k)
            out.push_back(cap + 1 + static_cast<std::int64_t>(rng.bits() % span));
        out.push_back(qmax);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

namespace {

double cone_gap(std::span<const Complex> ua, std::span<const Complex> va, std::span<const Complex> ub,
                std::span<const Complex> vb)
{
    // |w_a - w_b| with w = ((u+v)/2, (u-v)/2i) per coordinate pair
    double s = 0.0;
    for (std::size_t k = 0; k < ua.size(); ++k) {
        Complex du = ua[k] - ub[k];
        Complex dv = va[k] - vb[k];
        s += std::norm(0.5 * (du + dv)) + std::norm(0.5 * (du - dv));
    }
    return std::sqrt(s);
}

}  // namespace

SupEstimate sup_distance_powers(const ConjugatedRotation& f, const ConjugatedRotation& g,
                                std::span<const std::int64_t> powers, double delta, std::size_t count,
                                std::uint64_t seed, BallNorm norm)
{
    const int d = f.d;
    auto samples = ball_sample(d, delta, count, seed, norm);
    std::vector<double> dist(samples.size(), 0.0);
    std::vector<char> over(samples.size(), 0);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(samples.size()); ++k) {
        auto idx = static_cast<std::size_t>(k);
        std::vector<Complex> uf(d), vf(d), ug(d), vg(d);
        to_cone(samples[idx], uf, vf);
        ug = uf;
        vg = vf;
        if (!f.h.apply_inverse(uf, vf) || !g.h.apply_inverse(ug, vg)) {
            over[idx] = 1;
            continue;
        }
        double worst = 0.0;
        std::vector<Complex> a(d), b(d), c(d), e(d);
        for (std::int64_t i : powers) {
            for (std::int64_t sgn : {1, -1}) {
                a = uf; b = vf; c = ug; e = vg;
                Complex tf(static_cast<double>(f.alpha.multiple(sgn * i)) / static_cast<double>(f.alpha.q));
                Complex tg(static_cast<double>(g.alpha.multiple(sgn * i)) / static_cast<double>(g.alpha.q));
                kern::rotate<Complex>(std::span<Complex>(a), std::span<Complex>(b), tf);
                kern::rotate<Complex>(std::span<Complex>(c), std::span<Complex>(e), tg);
                if (!f.h.apply(a, b) || !g.h.apply(c, e)) {
                    over[idx] = 1;
                    break;
                }
                worst = std::max(worst, cone_gap(a, b, c, e));
            }
            if (over[idx])
                break;
        }
        dist[idx] = worst;
    }
    SupEstimate out;
    out.count = count;
    out.seed = seed;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (over[k])
            ++out.overflow_count;
        else
            out.estimate = std::max(out.estimate, dist[k]);
    }
    return out;
}

}  // namespace akc
