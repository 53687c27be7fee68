#include "akc/transitivity.hpp"

#include "akc/kernels.hpp"

#include <cmath>
#include <numbers>

namespace akc {

namespace {

double wrap(double s)
{
    s -= std::floor(s);
    return s >= 1.0 ? 0.0 : s;
}

double turns(Complex c)
{
    return std::arg(c) / (2.0 * std::numbers::pi);
}

}  // namespace

SpherePoint MoveSequence::apply(const SpherePoint& z) const
{
    SpherePoint out = z;
    for (auto it = moves.rbegin(); it != moves.rend(); ++it)
        kern::move<Complex>(std::span<Complex>(out.z), it->axis, it->s);
    return out;
}

Chain MoveSequence::chain() const
{
    Chain c;
    for (const auto& m : moves)
        c.factors.emplace_back(m);
    return c;
}

std::pair<double, double> solve_two_coord(const SpherePoint& z, int j, double rho1, double rhoj)
{
    Axis::tau(j).validate(z.dim());
    if (rho1 < 0 || rhoj < 0)
        throw PreconditionError("target moduli must be nonnegative");
    const Complex z1 = z.z[0];
    const Complex zj = z.z[j - 1];
    const double r1 = std::abs(z1);
    const double rj = std::abs(zj);
    const double mass = r1 * r1 + rj * rj;
    if (std::abs(rho1 * rho1 + rhoj * rhoj - mass) > 1e-10)
        throw PreconditionError("target moduli do not match the pair's mass");
    if (std::abs(rho1 - r1) <= 1e-12 || mass == 0.0)
        return {0.0, 0.0};

    // z'_1 = e^{i pi s}(cos(pi s) z_1 + i sin(pi s) e^{2 pi i t} z_j); this t
    // puts the two terms in opposite phase, so |z'_1| = |cos(pi s) r1 - sin(pi s) rj|.
    const double t = wrap(turns(z1) - turns(zj) + 0.25);
    const double R = std::sqrt(mass);
    const double phi0 = std::atan2(rj, r1);
    const double s0 = (std::numbers::pi / 2 - phi0) / std::numbers::pi;
    auto modulus = [&](double s) { return std::abs(std::cos(std::numbers::pi * s) * r1 - std::sin(std::numbers::pi * s) * rj); };

    const double target = std::min(rho1, R);
    double lo, hi;
    bool decreasing;
    if (target <= r1) {
        lo = 0.0;
        hi = s0;
        decreasing = true;
    } else {
        lo = s0;
        hi = 1.0 - phi0 / std::numbers::pi;
        decreasing = false;
    }
    int it = 0;
    for (; it < 200 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        bool above = modulus(mid) > target;
        if (above == decreasing)
            lo = mid;
        else
            hi = mid;
    }
    double s = 0.5 * (lo + hi);
    if (std::abs(modulus(s) - target) > 1e-9 * std::max(1.0, R))
        throw IntegrityError("two-coordinate bisection did not converge");
    return {t, wrap(s)};
}

MoveSequence realize_moduli(const SpherePoint& z, std::span<const double> rho)
{
    const int d = z.dim();
    if (static_cast<int>(rho.size()) != d)
        throw PreconditionError("modulus vector has the wrong length");
    double s = 0.0;
    for (double r : rho) {
        if (r < 0)
            throw PreconditionError("moduli must be nonnegative");
        s += r * r;
    }
    if (std::abs(s - 1.0) > 1e-10)
        throw PreconditionError("target moduli must have unit square sum");

    // pass[p][j]: moves (tau_j^s, xi_j^t) of pass p, p = 0 applied first
    std::vector<std::vector<AxisMove>> pass(2, std::vector<AxisMove>(2 * (d - 1)));
    SpherePoint cur = z;
    for (int p = 0; p < 2; ++p) {
        for (int j = d; j >= 2; --j) {
            double a1 = std::abs(cur.z[0]);
            double aj = std::abs(cur.z[j - 1]);
            double mass = a1 * a1 + aj * aj;
            double rj = p == 0 ? 0.0 : std::min(rho[j - 1], std::sqrt(mass));
            double r1 = std::sqrt(std::max(0.0, mass - rj * rj));
            auto [t, sj] = solve_two_coord(cur, j, r1, rj);
            kern::xi<Complex>(std::span<Complex>(cur.z), j, t);
            kern::tau<Complex>(std::span<Complex>(cur.z), j, sj);
            pass[p][2 * (j - 2)] = {Axis::tau(j), sj};
            pass[p][2 * (j - 2) + 1] = {Axis::xi(j), t};
        }
    }
    MoveSequence out;
    out.moves = pass[1];
    out.moves.insert(out.moves.end(), pass[0].begin(), pass[0].end());
    return out;
}

MoveSequence realize_point(const SpherePoint& z, const SpherePoint& target)
{
    z.require_unit(1e-10);
    target.require_unit(1e-10);
    const int d = z.dim();
    if (target.dim() != d)
        throw PreconditionError("dimension mismatch");
    std::vector<double> rho(d);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        rho[k] = std::abs(target.z[k]);
        s += rho[k] * rho[k];
    }
    for (auto& r : rho)
        r /= std::sqrt(s);
    MoveSequence moduli = realize_moduli(z, rho);
    SpherePoint mid = moduli.apply(z);

    MoveSequence out;
    std::vector<AxisMove> phases;
    for (int k = 1; k <= d; ++k) {
        double ph = 0.0;
        if (std::abs(target.z[k - 1]) > 0.0 && std::abs(mid.z[k - 1]) > 0.0)
            ph = wrap(turns(target.z[k - 1]) - turns(mid.z[k - 1]));
        phases.push_back({Axis::xi(k), ph});
    }
    out.moves.push_back(phases[0]);
    out.moves.push_back({Axis::tau(2), 0.0});
    for (int k = 2; k <= d; ++k)
        out.moves.push_back(phases[k - 1]);
    out.moves.insert(out.moves.end(), moduli.moves.begin(), moduli.moves.end());
    return out;
}

double start_eta(int d)
{
    return std::pow(4.0, -(d + 1));
}

SpherePoint dichotomy_image(const SpherePoint& zbar, std::span<const TwistMap> ladder, int j)
{
    const int d = zbar.dim();
    const int top = 6 * d - 4;
    if (static_cast<int>(ladder.size()) != top + 1)
        throw PreconditionError("ladder must hold 6d-3 slots");
    SpherePoint z = zbar;
    for (int l = top; l >= top - j + 2; --l) {
        if (!kern::twist<Complex>(std::span<Complex>(z.z), ladder[l], +1))
            throw IntegrityError("overflow while classifying a start point");
    }
    return z;
}

StartCase start_dichotomy(const SpherePoint& zbar, std::span<const TwistMap> ladder)
{
    zbar.require_unit(1e-10);
    const int d = zbar.dim();
    const double eta = start_eta(d);
    StartCase out;
    double a1 = std::abs(zbar.z[0]);
    if (a1 > eta) {
        out.case1 = true;
        out.z = zbar;
        out.margin = a1 - eta;
        return out;
    }
    for (int j = 2; j <= d; ++j) {
        SpherePoint z = dichotomy_image(zbar, ladder, j);
        double gap = std::abs(z.z[0] - z.z[j - 1]);
        if (gap > eta) {
            out.case1 = false;
            out.j = j;
            out.z = std::move(z);
            out.margin = gap - eta;
            return out;
        }
    }
    throw IntegrityError("start point fits neither case of the dichotomy");
}

}  // namespace akc
