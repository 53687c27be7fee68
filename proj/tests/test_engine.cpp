#include "akc/engine.hpp"

#include <doctest.h>

#include <cmath>

using namespace akc;

namespace {

double max_gap(const SpherePoint& a, const SpherePoint& b)
{
    double m = 0;
    for (std::size_t k = 0; k < a.z.size(); ++k)
        m = std::max(m, std::abs(a.z[k] - b.z[k]));
    return m;
}

RunConfig tiny_config()
{
    RunConfig c;
    c.ensemble_size = 3;
    c.search_orbit_len = 2048;
    c.reference_points = 20000;
    c.nballs = 24;
    c.closeness_samples = 8;
    c.power_cap = 64;
    c.power_extra = 4;
    c.transversal_samples = 256;
    c.amplitude_cap = 256;
    c.denominator_cap = 4096;
    c.cud_min_prefix = 64;
    return c;
}

}  // namespace

TEST_CASE("ladder for d=2 follows the fixed pattern")
{
    auto L = build_ladder(2);
    REQUIRE(L.slots.size() == 9);
    CHECK(L.M() == 8);
    const char* axes[] = {"xi1", "tau2", "xi2", "tau2", "xi2", "tau2", "xi2", "tau2", "xi2"};
    for (int l = 0; l < 9; ++l) {
        CHECK(L.slots[l].axis.str() == axes[l]);
        CHECK(L.slots[l].status == SlotStatus::Unset);
    }
    CHECK(L.slots[0].fn.str().rfind("psi2", 0) == 0);
    CHECK(L.slots[2].fn.str().rfind("psi1", 0) == 0);
    CHECK(L.slots[1].fn.str().rfind("chi2", 0) == 0);
}

TEST_CASE("ladder pairing is valid for d=3 and d=4")
{
    for (int d : {3, 4}) {
        auto L = build_ladder(d);
        REQUIRE(static_cast<int>(L.slots.size()) == 6 * d - 3);
        for (const auto& s : L.slots)
            CHECK_NOTHROW((TwistMap{s.axis, s.fn, 1.0}).validate(d));
    }
}

TEST_CASE("omitted slots drop out of the chain")
{
    auto L = build_ladder(2);
    for (auto& s : L.slots) {
        s.fn.degree = 2;
        s.amplitude = 3.0;
        s.status = SlotStatus::Ok;
    }
    CHECK(L.chain().factors.size() == 9);
    L.slots[4].amplitude = 0.0;
    L.slots[4].fn.degree = 1 << 20;
    L.slots[4].status = SlotStatus::Failed;
    CHECK(L.chain().factors.size() == 8);
    CHECK(L.effective_twist(4).fn.degree == 1);
}

TEST_CASE("distribution schedule tightens monotonically")
{
    auto e = distribution_schedule(2, 0.1, 0.5);
    REQUIRE(e.size() == 9);
    CHECK(e.front() == doctest::Approx(0.1));
    CHECK(e.back() == doctest::Approx(0.05));
    for (std::size_t k = 1; k < e.size(); ++k)
        CHECK(e[k] < e[k - 1]);
}

TEST_CASE("ensemble contains the adversarial kinds")
{
    auto en = build_ensemble(3, 5, 1);
    std::map<std::string, int> kinds;
    for (const auto& p : en) {
        ++kinds[p.kind];
        CHECK(p.z.norm_defect() < 1e-12);
    }
    CHECK(kinds["lebesgue"] == 5);
    CHECK(kinds["z1=0"] == 1);
    CHECK(kinds["z1=zj"] == 2);
    CHECK(kinds["eta-"] == 1);
    CHECK(kinds["eta+"] == 1);
    for (const auto& p : en) {
        if (p.kind == "z1=0")
            CHECK(std::abs(p.z.z[0]) == 0.0);
        if (p.kind == "eta-")
            CHECK(std::abs(p.z.z[0]) < start_eta(3));
        if (p.kind == "eta+")
            CHECK(std::abs(p.z.z[0]) > start_eta(3));
    }
}

TEST_CASE("conjugated rotation: power zero, period and additivity")
{
    TwistMap t{Axis::tau(2), Invariant::chi(2, 5), 40.0};
    TwistMap x{Axis::xi(2), Invariant::psi(1, 5), 25.0};
    ConjugatedRotation f{2, Chain{{t, x}}, Rational::make(2, 5)};
    for (const auto& z : lebesgue_sample(2, 20, 3)) {
        auto p0 = evaluate_chain(f, z, 0);
        CHECK(max_gap(p0.value, z) < 1e-12);
        auto p5 = evaluate_chain(f, z, 5);
        CHECK(max_gap(p5.value, z) < 1e-9);
        auto a = evaluate_chain(f, evaluate_chain(f, z, 2).value, 1);
        auto b = evaluate_chain(f, z, 3);
        CHECK(max_gap(a.value, b.value) < 1e-9);
        auto back = evaluate_chain(f, b.value, -3);
        CHECK(max_gap(back.value, z) < 1e-9);
    }
}

TEST_CASE("next rational: generous budget takes the first doubling")
{
    NextRationalOptions opt;
    opt.count = 16;
    opt.seed = 3;
    auto r = choose_next_rational(Rational::make(1, 2), Chain{}, Chain{}, 2, 10.0, opt);
    CHECK(r.alpha == Rational::make(3, 4));
    CHECK(r.closeness_pass);
    CHECK_THROWS_AS(choose_next_rational(Rational::make(1, 2), Chain{}, Chain{}, 2, 0.0, opt),
                    PreconditionError);
}

TEST_CASE("next rational: tighter budget needs a larger denominator")
{
    NextRationalOptions opt;
    opt.count = 16;
    opt.seed = 3;
    std::int64_t prev = 0;
    for (double b : {1.0, 1e-2, 1e-4}) {
        auto r = choose_next_rational(Rational::make(1, 2), Chain{}, Chain{}, 2, b, opt);
        CHECK(r.closeness_pass);
        CHECK(r.alpha.q >= prev);
        CHECK(r.alpha.q % 2 == 0);
        // |phi^{i a} - phi^{i/2}| on the unit sphere is 2 sin(pi i |a - 1/2|), i <= 2
        double gap = std::abs(r.alpha.value() - 0.5);
        CHECK(2 * std::sin(std::numbers::pi * 2 * gap) < b);
        prev = r.alpha.q;
    }
}

TEST_CASE("next rational: strict mode throws at the denominator cap")
{
    NextRationalOptions opt;
    opt.count = 8;
    opt.denominator_cap = 64;
    opt.strict = true;
    CHECK_THROWS(choose_next_rational(Rational::make(1, 2), Chain{}, Chain{}, 2, 1e-9, opt));
    opt.strict = false;
    auto r = choose_next_rational(Rational::make(1, 2), Chain{}, Chain{}, 2, 1e-9, opt);
    CHECK_FALSE(r.closeness_pass);
    CHECK(r.alpha.q <= 64);
}

TEST_CASE("small inner induction is deterministic and fills every slot")
{
    auto cfg = tiny_config();
    auto a = run_inner_induction(Rational::make(1, 2), 0.5, cfg, 77);
    auto b = run_inner_induction(Rational::make(1, 2), 0.5, cfg, 77);
    REQUIRE(a.records.size() == 9);
    REQUIRE(a.alphas.size() == 10);
    for (std::size_t l = 0; l < a.records.size(); ++l) {
        CHECK(a.records[l].status != SlotStatus::Unset);
        CHECK(a.records[l].amplitude == b.records[l].amplitude);
    }
    for (std::size_t k = 0; k < a.alphas.size(); ++k)
        CHECK(a.alphas[k] == b.alphas[k]);
    CHECK(a.C0 == b.C0);
    CHECK(a.failures == b.failures);
    // denominators only grow
    for (std::size_t k = 1; k < a.alphas.size(); ++k)
        CHECK(a.alphas[k].q % a.alphas[k - 1].q == 0);
    CHECK(a.outcomes.size() == a.ensemble.size());
}
