#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace akc {

using Complex = std::complex<double>;

// Magnitude beyond which an evaluation is reported as overflowed.
inline constexpr double kOverflow = 1e100;

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// p/q reduced, 0 <= p < q.
struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;

    static Rational make(std::int64_t p, std::int64_t q);
    static Rational parse(std::string_view text);

    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    // numerator of the fractional part of i*p/q
    std::int64_t multiple(std::int64_t i) const;
    std::string str() const;

    friend bool operator==(const Rational&, const Rational&) = default;
};

// Continued-fraction approximation with |p/q - x| < tol and q <= qmax.
Rational rational_near(double x, double tol, std::int64_t qmax);

enum class AxisType { Circle, Xi, Tau };

// Xi(i), i in 1..d, or Tau(i), i in 2..d. Circle is the diagonal action phi.
struct Axis {
    AxisType type = AxisType::Circle;
    int index = 0;

    static Axis circle() { return {AxisType::Circle, 0}; }
    static Axis xi(int i) { return {AxisType::Xi, i}; }
    static Axis tau(int i) { return {AxisType::Tau, i}; }

    void validate(int d) const;
    std::string str() const;
    static Axis parse(std::string_view text);

    friend bool operator==(const Axis&, const Axis&) = default;
};

enum class InvariantType { Psi, Chi };

// Psi(j,q): Re(z_j^q). Chi(j,q): Re((z_1 - z_j)^q).
struct Invariant {
    InvariantType type = InvariantType::Psi;
    int index = 1;
    std::int64_t degree = 1;

    static Invariant psi(int j, std::int64_t q) { return {InvariantType::Psi, j, q}; }
    static Invariant chi(int j, std::int64_t q) { return {InvariantType::Chi, j, q}; }

    void validate(int d) const;
    std::string str() const;
    static Invariant parse(std::string_view text);

    friend bool operator==(const Invariant&, const Invariant&) = default;
};

struct TwistMap {
    Axis axis;
    Invariant fn;
    double amplitude = 0.0;

    // Pairing: Xi(i) with Psi(j), j != i; Tau(i) with Chi(i).
    void validate(int d) const;
};

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace akc
