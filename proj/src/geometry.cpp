#include "akc/geometry.hpp"

#include "akc/kernels.hpp"

#include <cmath>
#include <numbers>

namespace akc {

double SpherePoint::norm_defect() const
{
    double s = 0.0;
    for (const auto& c : z)
        s += std::norm(c);
    return std::abs(s - 1.0);
}

void SpherePoint::require_unit(double tol) const
{
    if (z.empty())
        throw PreconditionError("empty sphere point");
    if (!(norm_defect() <= tol))
        throw PreconditionError("point is not on the unit sphere");
}

std::vector<double> SpherePoint::real_coords() const
{
    std::vector<double> x;
    x.reserve(2 * z.size());
    for (const auto& c : z) {
        x.push_back(c.real());
        x.push_back(c.imag());
    }
    return x;
}

SpherePoint SpherePoint::from_real(std::span<const double> x)
{
    SpherePoint p;
    p.z.reserve(x.size() / 2);
    for (std::size_t k = 0; k + 1 < x.size(); k += 2)
        p.z.emplace_back(x[k], x[k + 1]);
    return p;
}

double ComplexifiedPoint::norm() const
{
    double s = 0.0;
    for (const auto& c : w)
        s += std::norm(c);
    return std::sqrt(s);
}

double ComplexifiedPoint::max_abs() const
{
    double m = 0.0;
    for (const auto& c : w)
        m = std::max(m, std::abs(c));
    return m;
}

bool ComplexifiedPoint::overflowed() const
{
    for (const auto& c : w)
        if (!kern::finite_bounded(c))
            return true;
    return false;
}

ComplexifiedPoint complexify(const SpherePoint& p)
{
    ComplexifiedPoint out;
    out.w.reserve(2 * p.z.size());
    for (const auto& c : p.z) {
        out.w.emplace_back(c.real(), 0.0);
        out.w.emplace_back(c.imag(), 0.0);
    }
    return out;
}

void to_cone(const ComplexifiedPoint& p, std::span<Complex> u, std::span<Complex> v)
{
    const Complex i(0.0, 1.0);
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = p.w[2 * k] + i * p.w[2 * k + 1];
        v[k] = p.w[2 * k] - i * p.w[2 * k + 1];
    }
}

ComplexifiedPoint from_cone(std::span<const Complex> u, std::span<const Complex> v)
{
    const Complex i(0.0, 1.0);
    ComplexifiedPoint p;
    p.w.resize(2 * u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        p.w[2 * k] = 0.5 * (u[k] + v[k]);
        p.w[2 * k + 1] = (u[k] - v[k]) / (2.0 * i);
    }
    return p;
}

SpherePoint circle_action(double t, const SpherePoint& z)
{
    z.require_unit();
    SpherePoint out = z;
    kern::rotate<Complex>(out.z, t);
    return out;
}

SpherePoint circle_action(const Rational& alpha, std::int64_t power, const SpherePoint& z)
{
    z.require_unit();
    SpherePoint out = z;
    kern::rotate<Complex>(out.z, alpha, power);
    return out;
}

ComplexifiedPoint circle_action_complexified(Complex t, const ComplexifiedPoint& w)
{
    int d = w.dim();
    std::vector<Complex> u(d), v(d);
    to_cone(w, u, v);
    kern::rotate<Complex>(u, v, t);
    return from_cone(u, v);
}

double distance(const SpherePoint& a, const SpherePoint& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.z.size(); ++k)
        s += std::norm(a.z[k] - b.z[k]);
    return std::sqrt(s);
}

double distance(const ComplexifiedPoint& a, const ComplexifiedPoint& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.w.size(); ++k)
        s += std::norm(a.w[k] - b.w[k]);
    return std::sqrt(s);
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    eng_.seed(seq);
}

double Stream::uniform()
{
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Stream::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

void PointCloud::push(std::span<const Complex> z)
{
    for (const auto& c : z) {
        x.push_back(c.real());
        x.push_back(c.imag());
    }
}

SpherePoint PointCloud::point(std::size_t i) const
{
    return SpherePoint::from_real(std::span<const double>(at(i), static_cast<std::size_t>(dim)));
}

namespace {

void gaussian_unit(Stream& rng, double* out, int n)
{
    double s = 0.0;
    do {
        s = 0.0;
        for (int k = 0; k < n; ++k) {
            out[k] = rng.normal();
            s += out[k] * out[k];
        }
    } while (s == 0.0);
    double inv = 1.0 / std::sqrt(s);
    for (int k = 0; k < n; ++k)
        out[k] *= inv;
}

}  // namespace

PointCloud lebesgue_cloud(int d, std::size_t count, std::uint64_t seed)
{
    if (d < 1)
        throw PreconditionError("dimension index must be positive");
    PointCloud cloud;
    cloud.dim = 2 * d;
    cloud.x.resize(count * static_cast<std::size_t>(cloud.dim));
    auto nchunks = static_cast<std::ptrdiff_t>((count + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
        Stream rng(seed, static_cast<std::uint64_t>(c));
        std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        std::size_t hi = std::min(count, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i)
            gaussian_unit(rng, cloud.at(i), cloud.dim);
    }
    return cloud;
}

std::vector<SpherePoint> lebesgue_sample(int d, std::size_t count, std::uint64_t seed)
{
    auto cloud = lebesgue_cloud(d, count, seed);
    std::vector<SpherePoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(cloud.point(i));
    return out;
}

std::vector<ComplexifiedPoint> ball_sample(int d, double delta, std::size_t count, std::uint64_t seed,
                                           BallNorm norm)
{
    if (!(delta > 0.0))
        throw PreconditionError("ball radius must be positive");
    std::vector<ComplexifiedPoint> out(count);
    auto nchunks = static_cast<std::ptrdiff_t>((count + kChunk - 1) / kChunk);
    const int n = 2 * d;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
        Stream rng(seed, static_cast<std::uint64_t>(c));
        std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        std::size_t hi = std::min(count, lo + kChunk);
        std::vector<double> g(2 * n);
        for (std::size_t k = lo; k < hi; ++k) {
            auto& w = out[k].w;
            w.resize(n);
            if (k % 2 == 0) {
                // real stratum: sphere points at radius min(1, delta), or inside the real ball
                gaussian_unit(rng, g.data(), n);
                double r = k % 4 == 0 ? std::min(1.0, delta) : delta * std::pow(rng.uniform(), 1.0 / n);
                for (int j = 0; j < n; ++j)
                    w[j] = Complex(r * g[j], 0.0);
            } else if (norm == BallNorm::Euclidean) {
                gaussian_unit(rng, g.data(), 2 * n);
                double r = delta * std::pow(rng.uniform(), 1.0 / (2 * n));
                for (int j = 0; j < n; ++j)
                    w[j] = Complex(r * g[2 * j], r * g[2 * j + 1]);
            } else {
                for (int j = 0; j < n; ++j) {
                    double r = delta * std::sqrt(rng.uniform());
                    double a = 2.0 * std::numbers::pi * rng.uniform();
                    w[j] = std::polar(r, a);
                }
            }
        }
    }
    return out;
}

}  // namespace akc
