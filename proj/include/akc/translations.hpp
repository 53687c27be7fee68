#pragma once

#include "akc/core.hpp"
#include "akc/geometry.hpp"

#include <span>

namespace akc {

template <class T>
struct Flagged {
    T value;
    bool overflow = false;
};

SpherePoint xi_apply(int i, double s, const SpherePoint& z);
ComplexifiedPoint xi_apply(int i, Complex s, const ComplexifiedPoint& w);
SpherePoint tau_apply(int i, double s, const SpherePoint& z);
ComplexifiedPoint tau_apply(int i, Complex s, const ComplexifiedPoint& w);
SpherePoint axis_apply(const Axis& axis, double s, const SpherePoint& z);
ComplexifiedPoint axis_apply(const Axis& axis, Complex s, const ComplexifiedPoint& w);

Flagged<double> invariant_eval(const Invariant& fn, const SpherePoint& z);
Flagged<Complex> invariant_eval(const Invariant& fn, const ComplexifiedPoint& w);

Flagged<SpherePoint> twist_apply(const TwistMap& t, const SpherePoint& z);
Flagged<ComplexifiedPoint> twist_apply(const TwistMap& t, const ComplexifiedPoint& w);
Flagged<SpherePoint> twist_invert(const TwistMap& t, const SpherePoint& z);
Flagged<ComplexifiedPoint> twist_invert(const TwistMap& t, const ComplexifiedPoint& w);

// Identity checks. Twists of high degree are violently ill-conditioned
// (Lipschitz constant ~ 2 pi A q |z_1 - z_j|^(q-1)), so double evaluation
// cannot resolve 1e-10 there; Quad evaluates the same code in binary128.
enum class Precision { Double, Quad };

double check_commutation(const TwistMap& t, const Rational& alpha, std::span<const SpherePoint> samples,
                         Precision prec = Precision::Quad);
double twist_roundtrip_defect(const TwistMap& t, const SpherePoint& z, Precision prec = Precision::Quad);

// Determinant of the twist's derivative restricted to tangent spaces of the
// sphere, in orthonormal frames. Derivative columns come from complex-step
// differences through the holomorphic extension, evaluated in binary128.
double twist_jacobian(const TwistMap& t, const SpherePoint& z);

}  // namespace akc
