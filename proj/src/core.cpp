#include "akc/core.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

namespace akc {

namespace {

std::int64_t parse_int(std::string_view s)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw PreconditionError("bad integer: " + std::string(s));
    return v;
}

}  // namespace

Rational Rational::make(std::int64_t p, std::int64_t q)
{
    if (q <= 0)
        throw PreconditionError("rational denominator must be positive");
    p %= q;
    if (p < 0)
        p += q;
    std::int64_t g = std::gcd(p, q);
    if (g == 0)
        g = q;
    return {p / g, q / g};
}

Rational Rational::parse(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        throw PreconditionError("rational must be p/q: " + std::string(text));
    return make(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::int64_t Rational::multiple(std::int64_t i) const
{
    __int128 m = static_cast<__int128>(i) * p % q;
    if (m < 0)
        m += q;
    return static_cast<std::int64_t>(m);
}

std::string Rational::str() const
{
    return std::to_string(p) + "/" + std::to_string(q);
}

Rational rational_near(double x, double tol, std::int64_t qmax)
{
    x -= std::floor(x);
    // convergents h/k of the continued fraction of x
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        auto ai = static_cast<std::int64_t>(a);
        std::int64_t h2 = ai * h1 + h0;
        std::int64_t k2 = ai * k1 + k0;
        if (k2 > qmax)
            break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) < tol)
            return Rational::make(h1, k1);
        double frac = r - a;
        if (frac <= 0)
            break;
        r = 1.0 / frac;
    }
    if (k1 > 0 && std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) < tol)
        return Rational::make(h1, k1);
    throw PreconditionError("no rational within tolerance below the denominator cap");
}

void Axis::validate(int d) const
{
    switch (type) {
    case AxisType::Circle:
        return;
    case AxisType::Xi:
        if (index < 1 || index > d)
            throw PreconditionError("xi index out of range: " + str());
        return;
    case AxisType::Tau:
        if (index < 2 || index > d)
            throw PreconditionError("tau index out of range: " + str());
        return;
    }
}

std::string Axis::str() const
{
    switch (type) {
    case AxisType::Circle:
        return "phi";
    case AxisType::Xi:
        return "xi" + std::to_string(index);
    case AxisType::Tau:
        return "tau" + std::to_string(index);
    }
    return {};
}

Axis Axis::parse(std::string_view text)
{
    if (text == "phi")
        return circle();
    if (text.starts_with("xi"))
        return xi(static_cast<int>(parse_int(text.substr(2))));
    if (text.starts_with("tau"))
        return tau(static_cast<int>(parse_int(text.substr(3))));
    throw PreconditionError("bad axis: " + std::string(text));
}

void Invariant::validate(int d) const
{
    if (degree < 1)
        throw PreconditionError("invariant degree must be >= 1");
    int lo = type == InvariantType::Chi ? 2 : 1;
    if (index < lo || index > d)
        throw PreconditionError("invariant index out of range: " + str());
}

std::string Invariant::str() const
{
    return std::string(type == InvariantType::Psi ? "psi" : "chi") + std::to_string(index) + "^"
           + std::to_string(degree);
}

Invariant Invariant::parse(std::string_view text)
{
    auto caret = text.find('^');
    if (caret == std::string_view::npos || caret < 4)
        throw PreconditionError("bad invariant: " + std::string(text));
    auto head = text.substr(0, 3);
    int j = static_cast<int>(parse_int(text.substr(3, caret - 3)));
    std::int64_t q = parse_int(text.substr(caret + 1));
    if (head == "psi")
        return psi(j, q);
    if (head == "chi")
        return chi(j, q);
    throw PreconditionError("bad invariant: " + std::string(text));
}

void TwistMap::validate(int d) const
{
    axis.validate(d);
    fn.validate(d);
    if (!std::isfinite(amplitude))
        throw PreconditionError("twist amplitude must be finite");
    bool ok = (axis.type == AxisType::Xi && fn.type == InvariantType::Psi && fn.index != axis.index)
              || (axis.type == AxisType::Tau && fn.type == InvariantType::Chi
                  && fn.index == axis.index);
    if (!ok)
        throw PreconditionError("invariant " + fn.str() + " is not constant along " + axis.str());
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label)
{
    // FNV-1a over the label, then a splitmix64 finalizer
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::uint64_t x = seed ^ h;
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace akc
