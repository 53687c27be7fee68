#pragma once

#include "akc/chain.hpp"
#include "akc/core.hpp"
#include "akc/geometry.hpp"

#include <span>
#include <utility>
#include <vector>

namespace akc {

// Product order: moves[0] acts last, as in k_0^{s_0} k_1^{s_1} ... applied to z.
struct MoveSequence {
    std::vector<AxisMove> moves;

    SpherePoint apply(const SpherePoint& z) const;
    Chain chain() const;
};

// (t, s) with tau_j^s xi_j^t z having |z'_1| = rho1, |z'_j| = rhoj.
std::pair<double, double> solve_two_coord(const SpherePoint& z, int j, double rho1, double rhoj);

// Two tau/xi passes, 4d-4 moves.
MoveSequence realize_moduli(const SpherePoint& z, std::span<const double> rho);

// xi_1, tau_2 (parameter 0), xi_2..xi_d, then realize_moduli: 5d-3 moves.
MoveSequence realize_point(const SpherePoint& z, const SpherePoint& target);

double start_eta(int d);

struct StartCase {
    bool case1 = true;
    int j = 0;          // Case2 index
    SpherePoint z;      // Case2 transformed point
    double margin = 0;  // |z_1| - eta or |z_1 - z_j| - eta
};

// ladder holds the 6d-3 slot twists; only the tail slots 6d-j-2..6d-4 are read.
StartCase start_dichotomy(const SpherePoint& zbar, std::span<const TwistMap> ladder);

// g_{6d-j-2} ... g_{6d-4} zbar
SpherePoint dichotomy_image(const SpherePoint& zbar, std::span<const TwistMap> ladder, int j);

}  // namespace akc
