#include "akc/engine.hpp"

#include "akc/balls.hpp"
#include "akc/translations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace akc {

std::string to_string(SlotStatus s)
{
    switch (s) {
    case SlotStatus::Ok: return "ok";
    case SlotStatus::Failed: return "failed";
    default: return "unset";
    }
}

SlotStatus slot_status_from(const std::string& s)
{
    if (s == "ok")
        return SlotStatus::Ok;
    if (s == "failed")
        return SlotStatus::Failed;
    if (s == "unset")
        return SlotStatus::Unset;
    throw PreconditionError("unknown slot status '" + s + "'");
}

// ---------------------------------------------------------------- ladder

TwistLadder build_ladder(int d)
{
    if (d < 2)
        throw PreconditionError("ladder needs d >= 2");
    TwistLadder out;
    out.d = d;
    auto add = [&](Axis a, Invariant f) { out.slots.push_back({a, f, 0.0, SlotStatus::Unset}); };
    add(Axis::xi(1), Invariant::psi(2, 1));
    add(Axis::tau(2), Invariant::chi(2, 1));
    for (int j = 2; j <= d; ++j)
        add(Axis::xi(j), Invariant::psi(1, 1));
    for (int rep = 0; rep < 2; ++rep)
        for (int j = 2; j <= d; ++j) {
            add(Axis::tau(j), Invariant::chi(j, 1));
            add(Axis::xi(j), Invariant::psi(1, 1));
        }
    for (int j = d; j >= 2; --j)
        add(Axis::tau(j), Invariant::chi(j, 1));
    add(Axis::xi(2), Invariant::psi(1, 1));
    if (static_cast<int>(out.slots.size()) != 6 * d - 3)
        throw IntegrityError("ladder slot count");
    return out;
}

TwistMap TwistLadder::twist(int l) const
{
    const auto& s = slots.at(static_cast<std::size_t>(l));
    return {s.axis, s.fn, s.amplitude};
}

TwistMap TwistLadder::effective_twist(int l) const
{
    TwistMap t = twist(l);
    if (t.amplitude == 0.0)
        t.fn.degree = 1;
    return t;
}

std::vector<TwistMap> TwistLadder::effective_twists() const
{
    std::vector<TwistMap> out;
    for (int l = 0; l <= M(); ++l)
        out.push_back(effective_twist(l));
    return out;
}

Chain TwistLadder::chain(int from, int to) const
{
    Chain out;
    for (int l = std::max(from, 0); l <= std::min(to, M()); ++l)
        if (slots[static_cast<std::size_t>(l)].amplitude != 0.0)
            out.factors.emplace_back(twist(l));
    return out;
}

std::vector<double> distribution_schedule(int d, double dist_eps, double tighten)
{
    const int M = 6 * d - 4;
    std::vector<double> out(static_cast<std::size_t>(M) + 1);
    for (int l = 0; l <= M; ++l)
        out[static_cast<std::size_t>(l)] = dist_eps * std::pow(tighten, static_cast<double>(l) / M);
    return out;
}

// ---------------------------------------------------------------- ensemble

namespace {

Complex unit_phase(Stream& rng)
{
    return std::polar(1.0, 2 * M_PI * rng.uniform());
}

// Fills z[from..] with a random vector of norm r.
void fill_rest(Stream& rng, std::vector<Complex>& z, std::size_t from, double r)
{
    double s = 0;
    for (std::size_t k = from; k < z.size(); ++k) {
        z[k] = {rng.normal(), rng.normal()};
        s += std::norm(z[k]);
    }
    s = std::sqrt(s);
    for (std::size_t k = from; k < z.size(); ++k)
        z[k] *= r / s;
}

}  // namespace

std::vector<EnsemblePoint> build_ensemble(int d, std::size_t lebesgue, std::uint64_t seed)
{
    std::vector<EnsemblePoint> out;
    for (auto& z : lebesgue_sample(d, lebesgue, derive_seed(seed, "lebesgue")))
        out.push_back({"lebesgue", std::move(z)});
    Stream rng(derive_seed(seed, "adversarial"), 0);
    const double eta = start_eta(d);
    const auto n = static_cast<std::size_t>(d);

    std::vector<Complex> z(n);
    z[0] = 0;
    fill_rest(rng, z, 1, 1.0);
    out.push_back({"z1=0", SpherePoint(z)});

    for (int j = 2; j <= d; ++j) {
        Complex c = unit_phase(rng);
        std::vector<Complex> w(n);
        double a = d == 2 ? std::sqrt(0.5) : 0.5;
        w[0] = w[static_cast<std::size_t>(j - 1)] = a * c;
        if (d > 2) {
            // remaining mass on the other coordinates
            std::vector<Complex> rest(n - 2);
            fill_rest(rng, rest, 0, std::sqrt(1 - 2 * a * a));
            for (std::size_t k = 1, r = 0; k < n; ++k)
                if (k != static_cast<std::size_t>(j - 1))
                    w[k] = rest[r++];
        }
        out.push_back({"z1=zj", SpherePoint(w)});
    }
    if (d > 2) {
        // small coinciding pair, forces the later dichotomy branches
        std::vector<Complex> w(n);
        Complex c = unit_phase(rng);
        w[0] = w[1] = 0.5 * eta * c;
        std::vector<Complex> rest(n - 2);
        fill_rest(rng, rest, 0, std::sqrt(1 - 0.5 * eta * eta));
        for (std::size_t k = 2; k < n; ++k)
            w[k] = rest[k - 2];
        out.push_back({"z1=z2 small", SpherePoint(w)});
    }
    for (double f : {0.99, 1.01}) {
        std::vector<Complex> w(n);
        w[0] = f * eta * unit_phase(rng);
        fill_rest(rng, w, 1, std::sqrt(1 - f * f * eta * eta));
        out.push_back({f < 1 ? "eta-" : "eta+", SpherePoint(w)});
    }
    return out;
}

// ---------------------------------------------------------------- workspace

namespace {

PointCloud circle_grid(const SpherePoint& z, std::int64_t L)
{
    PointCloud out;
    out.dim = 2 * z.dim();
    out.x.resize(static_cast<std::size_t>(L) * static_cast<std::size_t>(out.dim));
    Rational step = Rational::make(1, L);
#pragma omp parallel for schedule(static)
    for (std::int64_t m = 0; m < L; ++m) {
        SpherePoint p = circle_action(step, m, z);
        double* dst = out.at(static_cast<std::size_t>(m));
        for (int k = 0; k < z.dim(); ++k) {
            dst[2 * k] = p.z[static_cast<std::size_t>(k)].real();
            dst[2 * k + 1] = p.z[static_cast<std::size_t>(k)].imag();
        }
    }
    return out;
}

std::string slot_label(const char* what, int l, int k)
{
    return std::string(what) + "/" + std::to_string(l) + "/" + std::to_string(k);
}

DistributionReport trimmed(DistributionReport r)
{
    r.balls.clear();
    return r;
}

struct Reference {
    PointCloud raw;
    SortedCloud sorted;
};

Reference make_reference(const RunConfig& cfg, const SpherePoint& base, const std::vector<Axis>& dirs,
                         std::uint64_t seed)
{
    Reference r;
    r.raw = reference_cloud(base, dirs, static_cast<std::size_t>(cfg.reference_points), seed);
    r.sorted = sort_cloud(r.raw);
    return r;
}

bool active(const TrackedPoint& p, int l)
{
    return p.resolved && (p.case1 || l <= p.entry);
}

}  // namespace

InductionWorkspace make_workspace(const RunConfig& cfg, const Rational& alpha0, std::uint64_t seed,
                                  std::vector<EnsemblePoint> ensemble)
{
    InductionWorkspace ws;
    ws.cfg = cfg;
    ws.seed = seed;
    ws.ladder = build_ladder(cfg.d);
    // every slot carries the degree of alpha_0
    for (auto& s : ws.ladder.slots)
        s.fn.degree = alpha0.q;
    ws.eps = distribution_schedule(cfg.d, cfg.dist_eps, cfg.dist_tighten);
    const double eta = start_eta(cfg.d);
    for (auto& e : ensemble) {
        TrackedPoint p;
        p.base = e.z;
        p.source = std::move(e);
        if (std::abs(p.source.z.z[0]) > eta) {
            p.resolved = true;
            p.case1 = true;
            p.entry = ws.ladder.M();
        }
        p.orbit = circle_grid(p.source.z, cfg.search_orbit_len);
        ws.points.push_back(std::move(p));
    }
    ws.order.resize(ws.points.size());
    std::iota(ws.order.begin(), ws.order.end(), 0);
    return ws;
}

std::vector<Axis> point_dirs(const TwistLadder& ladder, const TrackedPoint& p, int l)
{
    std::vector<Axis> out{Axis::circle()};
    const int L = p.case1 ? ladder.M() : p.entry;
    for (int s = l; s <= L; ++s)
        out.push_back(ladder.slots[static_cast<std::size_t>(s)].axis);
    return out;
}

// ---------------------------------------------------------------- amplitude

AmplitudeResult choose_amplitude(InductionWorkspace& ws, int l)
{
    const RunConfig& cfg = ws.cfg;
    const int d = cfg.d;
    const int M = ws.ladder.M();
    if (l < 0 || l > M)
        throw PreconditionError("slot out of range");
    for (int s = l + 1; s <= M; ++s)
        if (ws.ladder.slots[static_cast<std::size_t>(s)].status == SlotStatus::Unset)
            throw PreconditionError("downstream slots must be set first");

    AmplitudeResult out;
    const double eps = ws.eps[static_cast<std::size_t>(l)];
    out.eps_prev = ws.eps[static_cast<std::size_t>(std::max(l - 1, 0))];
    auto& slot = ws.ladder.slots[static_cast<std::size_t>(l)];

    // points whose second-case entry slot is l
    const int jj = 6 * d - 3 - l;
    if (jj >= 2 && jj <= d) {
        const double eta = start_eta(d);
        auto tw = ws.ladder.effective_twists();
        for (auto& p : ws.points) {
            if (p.resolved)
                continue;
            SpherePoint img = dichotomy_image(p.source.z, tw, jj);
            if (std::abs(img.z[0] - img.z[static_cast<std::size_t>(jj - 1)]) > eta) {
                p.resolved = true;
                p.case1 = false;
                p.j = jj;
                p.entry = l;
                p.base = std::move(img);
                // from here on the orbit is the circle through the transformed point
                p.orbit = circle_grid(p.base, cfg.search_orbit_len);
            }
        }
    }

    if (slot.fn.degree > cfg.degree_cap) {
        slot.amplitude = 0.0;
        slot.status = SlotStatus::Failed;
        out.diagnostic = "degree " + std::to_string(slot.fn.degree) + " exceeds the degree cap "
                         + std::to_string(cfg.degree_cap) + "; twist omitted";
        if (cfg.closeness_policy == ClosenessPolicy::Enforce)
            throw StageFailure("slot " + std::to_string(l) + ": " + out.diagnostic);
        return out;
    }

    // transversality does not involve A, so it is evaluated once
    for (std::size_t k = 0; k < ws.points.size(); ++k) {
        const auto& p = ws.points[k];
        if (!active(p, l) || l == 0)
            continue;
        const int L = p.case1 ? M : p.entry;
        TransversalIndex idx{1, 0};
        std::vector<Axis> dirs;
        if (p.case1 && l == M) {
            idx = {1, 2};
            dirs = {ws.ladder.slots[static_cast<std::size_t>(M)].axis};
        } else if (!p.case1 && l == p.entry) {
            dirs = {ws.ladder.slots[static_cast<std::size_t>(l)].axis};
        } else {
            if (l == 1)
                idx = {2, 0};
            for (int s = l; s <= L; ++s)
                dirs.push_back(ws.ladder.slots[static_cast<std::size_t>(s)].axis);
        }
        auto rep = test_transversal(p.base, idx, dirs, eps, cfg.transversal_C,
                                    static_cast<std::size_t>(cfg.transversal_samples),
                                    derive_seed(ws.seed, slot_label("transversal", l, static_cast<int>(k))));
        if (!rep.pass) {
            out.transversality_pass = false;
            if (out.diagnostic.empty())
                out.diagnostic = "transversality fails at point " + std::to_string(k) + " (" + p.source.kind + ")";
        }
        out.transversality.push_back({static_cast<int>(k), std::move(rep)});
    }

    std::map<std::size_t, Reference> refs;
    auto reference_for = [&](std::size_t k) -> const Reference& {
        auto it = refs.find(k);
        if (it == refs.end()) {
            auto dirs = point_dirs(ws.ladder, ws.points[k], l);
            it = refs.emplace(k, make_reference(cfg, ws.points[k].base, dirs,
                                                 derive_seed(ws.seed, slot_label("ref", l, static_cast<int>(k)))))
                     .first;
        }
        return it->second;
    };

    double accepted = 0.0;
    DistributionReport last_fail;
    int last_fail_point = -1;
    for (double A = 1.0; A <= cfg.amplitude_cap; A *= 2.0) {
        out.tried.push_back(A);
        TwistMap tw{slot.axis, slot.fn, A};
        Chain g{{tw}};
        std::vector<PointCheck> checks;
        bool ok = true;
        for (std::size_t pos = 0; pos < ws.order.size(); ++pos) {
            auto k = static_cast<std::size_t>(ws.order[pos]);
            if (!active(ws.points[k], l))
                continue;
            PointCloud test = push_forward(g, ws.points[k].orbit);
            const auto& ref = reference_for(k);
            auto rep = test_UD_against(test, ref.sorted, ref.raw, eps, static_cast<std::size_t>(cfg.nballs),
                                       derive_seed(ws.seed, slot_label("ud", l, static_cast<int>(k))), cfg.ud_radius);
            rep.dirs = point_dirs(ws.ladder, ws.points[k], l);
            if (!rep.pass || rep.inconclusive) {
                ok = false;
                last_fail = trimmed(rep);
                last_fail_point = static_cast<int>(k);
                ws.order.erase(ws.order.begin() + static_cast<std::ptrdiff_t>(pos));
                ws.order.insert(ws.order.begin(), static_cast<int>(k));
                break;
            }
            checks.push_back({static_cast<int>(k), trimmed(std::move(rep))});
        }
        if (ok) {
            accepted = A;
            std::sort(checks.begin(), checks.end(), [](auto& a, auto& b) { return a.point < b.point; });
            out.distribution = std::move(checks);
            break;
        }
    }

    if (accepted > 0.0) {
        out.pass = out.transversality_pass;
        out.amplitude = accepted;
    } else {
        out.pass = false;
        out.amplitude = out.tried.empty() ? 0.0 : out.tried.back();
        std::ostringstream os;
        os << "amplitude search exhausted at A=" << out.amplitude << ": ud_along fails at point " << last_fail_point;
        if (last_fail_point >= 0)
            os << " (" << ws.points[static_cast<std::size_t>(last_fail_point)].source.kind
               << ", worst ratio " << last_fail.worst_ratio << (last_fail.inconclusive ? ", inconclusive" : "")
               << ")";
        out.diagnostic = out.diagnostic.empty() ? os.str() : out.diagnostic + "; " + os.str();
        if (last_fail_point >= 0)
            out.distribution.push_back({last_fail_point, last_fail});
    }
    if (!out.pass && cfg.closeness_policy == ClosenessPolicy::Enforce)
        throw StageFailure("slot " + std::to_string(l) + ": " + out.diagnostic);

    slot.amplitude = out.amplitude;
    slot.status = out.pass ? SlotStatus::Ok : SlotStatus::Failed;
    if (slot.amplitude != 0.0) {
        Chain g{{ws.ladder.twist(l)}};
        for (auto& p : ws.points)
            p.orbit = push_forward(g, p.orbit);
    }
    return out;
}

// ---------------------------------------------------------------- rational

NextRationalResult choose_next_rational(const Rational& alpha_l, const Chain& G_prev, const Chain& G_l, int d,
                                        double budget, const NextRationalOptions& opt)
{
    if (!(budget > 0.0))
        throw PreconditionError("closeness budget must be positive");
    NextRationalResult out;
    auto powers = closeness_powers(alpha_l.q, opt.power_cap, opt.power_extra, derive_seed(opt.seed, "powers"));
    out.power_max = powers.empty() ? 0 : powers.back();
    out.power_count = powers.size();
    ConjugatedRotation prev{d, G_prev, alpha_l};

    std::optional<Rational> first_orbit_pass;
    std::optional<Rational> first_candidate;
    for (std::int64_t r = 2; alpha_l.q <= opt.denominator_cap / r; r *= 2) {
        const std::int64_t q = alpha_l.q * r;
        // numerator nearest alpha_l + 1/q with gcd 1
        std::int64_t p0 = alpha_l.p * r;
        Rational cand;
        for (std::int64_t off = 1; off < q; ++off)
            if (std::gcd(p0 + off, q) == 1) {
                cand = Rational::make(p0 + off, q);
                break;
            }
        out.tried.push_back(q);
        if (!first_candidate)
            first_candidate = cand;

        bool orbit_ok = first_orbit_pass.has_value();
        if (!orbit_ok) {
            orbit_ok = !opt.orbit_ok || opt.orbit_ok(cand);
            if (orbit_ok)
                first_orbit_pass = cand;
        }
        ConjugatedRotation f{d, G_l, cand};
        auto est = sup_distance_powers(f, prev, powers, opt.delta, opt.count, derive_seed(opt.seed, "closeness"),
                                       opt.norm);
        bool close = !est.overflow() && est.estimate < budget / 2;
        if (opt.log) {
            std::ostringstream os;
            os << "  q=" << q << " orbit " << (orbit_ok ? "ok" : "short") << " closeness " << est.estimate
               << (est.overflow() ? " (overflow)" : "") << " budget/2 " << budget / 2;
            opt.log(os.str());
        }
        if (orbit_ok && close) {
            out.alpha = cand;
            out.closeness = est;
            out.closeness_pass = out.orbit_pass = true;
            return out;
        }
    }

    std::ostringstream os;
    os << "denominator cap " << opt.denominator_cap << " reached; orbit length "
       << (first_orbit_pass ? "met at q=" + std::to_string(first_orbit_pass->q) : std::string("never met"))
       << ", closeness never within budget/2 = " << budget / 2;
    out.diagnostic = os.str();
    if (opt.strict || !first_candidate)
        throw StageFailure(out.diagnostic);
    out.alpha = first_orbit_pass ? *first_orbit_pass : *first_candidate;
    out.orbit_pass = first_orbit_pass.has_value();
    out.closeness = sup_distance_powers(ConjugatedRotation{d, G_l, out.alpha}, prev, powers, opt.delta, opt.count,
                                        derive_seed(opt.seed, "closeness"), opt.norm);
    out.closeness_pass = false;
    return out;
}

// ---------------------------------------------------------------- inner induction

namespace {

std::vector<Checkpoint> checkpoints(const TwistMap& t, int d, std::uint64_t seed)
{
    std::vector<Checkpoint> out;
    for (const auto& x : lebesgue_sample(d, 4, derive_seed(seed, "checkpoints"))) {
        Checkpoint c;
        c.x = x.real_coords();
        auto img = twist_apply(t, x);
        c.overflow = img.overflow;
        c.image = img.value.real_coords();
        out.push_back(std::move(c));
    }
    return out;
}

PointCloud sphere_orbit(const ConjugatedRotation& f, const SpherePoint& x, std::int64_t length)
{
    return orbit(f, x, length);
}

}  // namespace

InnerResult run_inner_induction(const Rational& alpha0, double epsilon, const RunConfig& cfg, std::uint64_t seed,
                                std::optional<double> C0, const Logger& log)
{
    cfg.validate();
    if (!(epsilon > 0.0))
        throw PreconditionError("epsilon must be positive");
    auto say = [&](const std::string& s) {
        if (log)
            log(s);
    };
    const int d = cfg.d;
    InnerResult res;
    res.d = d;
    res.epsilon = epsilon;
    res.eps0 = cfg.eps0(epsilon);
    res.ensemble = build_ensemble(d, static_cast<std::size_t>(cfg.ensemble_size), derive_seed(seed, "ensemble"));

    auto ws = make_workspace(cfg, alpha0, seed, res.ensemble);
    const int M = ws.ladder.M();
    res.records.resize(static_cast<std::size_t>(M) + 1);

    for (int l = M; l >= 0; --l) {
        auto ar = choose_amplitude(ws, l);
        auto& rec = res.records[static_cast<std::size_t>(l)];
        rec.l = l;
        rec.amplitude = ar.amplitude;
        rec.status = ws.ladder.slots[static_cast<std::size_t>(l)].status;
        rec.diagnostic = ar.diagnostic;
        rec.alpha = alpha0;
        rec.degree = ws.ladder.slots[static_cast<std::size_t>(l)].fn.degree;
        rec.eps = ws.eps[static_cast<std::size_t>(l)];
        rec.eps_prev = ar.eps_prev;
        rec.tried = ar.tried;
        rec.distribution = std::move(ar.distribution);
        rec.transversality = std::move(ar.transversality);
        rec.transversality_pass = ar.transversality_pass;
        rec.checkpoints = checkpoints(ws.ladder.effective_twist(l), d, seed);
        {
            std::ostringstream os;
            os << "slot " << l << " " << ws.ladder.slots[static_cast<std::size_t>(l)].axis.str() << " A="
               << ar.amplitude << " " << to_string(rec.status);
            if (!ar.diagnostic.empty())
                os << ": " << ar.diagnostic;
            say(os.str());
        }
        if (rec.status != SlotStatus::Ok)
            res.failures.push_back("slot " + std::to_string(l) + ": " + ar.diagnostic);
    }
    for (const auto& p : ws.points)
        if (!p.resolved)
            throw IntegrityError("ensemble point left unclassified by the dichotomy");
    res.ladder = ws.ladder;
    res.alphas.assign(static_cast<std::size_t>(M) + 1, alpha0);

    // final references: full direction list at slot 0
    std::vector<Reference> ref0;
    for (std::size_t k = 0; k < ws.points.size(); ++k)
        ref0.push_back(make_reference(cfg, ws.points[k].base, point_dirs(ws.ladder, ws.points[k], 0),
                                      derive_seed(seed, slot_label("ref", 0, static_cast<int>(k)))));
    const Chain G = ws.ladder.chain();
    const double eps_final = ws.eps[0];
    const auto nballs = static_cast<std::size_t>(cfg.nballs);

    NextRationalOptions opt;
    opt.denominator_cap = cfg.denominator_cap;
    opt.power_cap = cfg.power_cap;
    opt.power_extra = static_cast<std::size_t>(cfg.power_extra);
    opt.delta = cfg.delta;
    opt.count = static_cast<std::size_t>(cfg.closeness_samples);
    opt.seed = derive_seed(seed, "next-rational");
    opt.norm = cfg.ball_norm;
    opt.strict = cfg.closeness_policy == ClosenessPolicy::Enforce;
    opt.log = log;
    std::vector<int> order = ws.order;
    opt.orbit_ok = [&](const Rational& a) {
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            auto k = static_cast<std::size_t>(order[pos]);
            PointCloud orb = push_forward(G, circle_grid(ws.points[k].source.z, a.q));
            auto rep = test_UD_against(orb, ref0[k].sorted, ref0[k].raw, eps_final, nballs,
                                       derive_seed(seed, slot_label("orbit-length", 0, static_cast<int>(k))), cfg.ud_radius);
            if (!rep.pass || rep.inconclusive) {
                order.erase(order.begin() + static_cast<std::ptrdiff_t>(pos));
                order.insert(order.begin(), static_cast<int>(k));
                return false;
            }
        }
        return true;
    };
    say("choosing alpha_" + std::to_string(M + 1));
    res.next = choose_next_rational(alpha0, ws.ladder.chain(0, M - 1), G, d,
                                    res.eps0 / std::ldexp(1.0, M + 1), opt);
    res.alphas.push_back(res.next.alpha);
    if (!res.next.closeness_pass || !res.next.orbit_pass)
        res.failures.push_back("alpha_" + std::to_string(M + 1) + ": " + res.next.diagnostic);

    // closeness per slot: f_l = G_l phi^{alpha_{l+1}} G_l^{-1} against f_{l-1}
    res.closeness_sum = 0.0;
    res.schedule_pass = true;
    for (int l = 0; l <= M; ++l) {
        auto& rec = res.records[static_cast<std::size_t>(l)];
        rec.closeness_budget = res.eps0 / std::ldexp(1.0, l + 1);
        if (l == M) {
            rec.closeness = res.next.closeness;
            rec.power_max = res.next.power_max;
            rec.power_count = res.next.power_count;
        } else {
            const Rational& a = res.alphas[static_cast<std::size_t>(l)];
            auto powers = closeness_powers(a.q, cfg.power_cap, static_cast<std::size_t>(cfg.power_extra),
                                           derive_seed(seed, slot_label("powers", l, 0)));
            ConjugatedRotation f{d, ws.ladder.chain(0, l), res.alphas[static_cast<std::size_t>(l) + 1]};
            ConjugatedRotation g{d, ws.ladder.chain(0, l - 1), a};
            rec.closeness = sup_distance_powers(f, g, powers, cfg.delta, opt.count,
                                                derive_seed(seed, slot_label("closeness", l, 0)), cfg.ball_norm);
            rec.power_max = powers.empty() ? 0 : powers.back();
            rec.power_count = powers.size();
        }
        rec.closeness_pass = !rec.closeness.overflow() && rec.closeness.estimate < rec.closeness_budget;
        res.closeness_sum += rec.closeness.overflow() ? std::numeric_limits<double>::infinity()
                                                      : rec.closeness.estimate;
        res.schedule_pass = res.schedule_pass && rec.closeness_pass;
    }
    res.schedule_pass = res.schedule_pass && res.closeness_sum < res.eps0;
    if (!res.schedule_pass) {
        std::ostringstream os;
        os << "closeness schedule: sum " << res.closeness_sum << " vs eps0 " << res.eps0;
        res.failures.push_back(os.str());
    }
    {
        std::vector<std::int64_t> one{1};
        ConjugatedRotation phi0{d, Chain{}, alpha0};
        res.final_closeness = sup_distance_powers(res.final_map(), phi0, one, cfg.delta, opt.count,
                                                  derive_seed(seed, "final-closeness"), cfg.ball_norm);
        res.final_closeness_pass = !res.final_closeness.overflow() && res.final_closeness.estimate < res.eps0;
        if (!res.final_closeness_pass) {
            std::ostringstream os;
            os << "final closeness " << res.final_closeness.estimate << " ("
               << res.final_closeness.overflow_count << " overflowed samples) vs eps0 " << res.eps0;
            res.failures.push_back(os.str());
        }
    }

    // final orbits: ud_along the full list, then cud at the measured C0
    const ConjugatedRotation f = res.final_map();
    const std::int64_t qn = f.alpha.q;
    say("final verification, orbit length " + std::to_string(qn));
    std::vector<SpherePoint> starts;
    for (const auto& p : ws.points) {
        SpherePoint x = p.source.z;
        if (!G.apply(std::span<Complex>(x.z)))
            throw IntegrityError("overflow while mapping a test point");
        starts.push_back(std::move(x));
    }
    if (!C0) {
        double worst = 1.0;
        for (std::size_t k = 0; k < ws.points.size(); ++k) {
            auto rep = test_CUD(sphere_orbit(f, starts[k], qn), 1e12, cfg.cud_eps, nballs,
                                derive_seed(seed, "cud-calibration"));
            worst = std::max(worst, rep.worst_ratio);
        }
        res.calibration_worst = worst;
        C0 = 2 * worst;
        if (!std::isfinite(*C0)) {
            res.failures.push_back("C0 calibration found an empty ball");
            C0 = 1e12;
        }
    }
    res.C0 = *C0;
    res.distribution_pass = true;
    for (std::size_t k = 0; k < ws.points.size(); ++k) {
        const auto& p = ws.points[k];
        PointOutcome o;
        o.point = static_cast<int>(k);
        o.kind = p.source.kind;
        o.case1 = p.case1;
        o.j = p.j;
        o.entry = p.entry;
        o.zbar = p.source.z;
        o.orbit_length = qn;
        PointCloud orb = sphere_orbit(f, starts[k], qn);
        o.ud = trimmed(test_UD_against(orb, ref0[k].sorted, ref0[k].raw, eps_final, nballs,
                                       derive_seed(seed, slot_label("final-ud", 0, static_cast<int>(k))), cfg.ud_radius));
        o.ud.dirs = point_dirs(ws.ladder, p, 0);
        o.cud = trimmed(test_CUD(orb, res.C0, cfg.cud_eps, nballs, derive_seed(seed, "cud-final")));
        o.pass = o.ud.pass && !o.ud.inconclusive && o.cud.pass && !o.cud.inconclusive;
        if (!o.pass) {
            res.distribution_pass = false;
            std::ostringstream os;
            os << "final distribution at point " << k << " (" << o.kind << "): ud "
               << (o.ud.pass ? "pass" : "fail") << ", cud " << (o.cud.pass ? "pass" : "fail");
            res.failures.push_back(os.str());
        }
        res.outcomes.push_back(std::move(o));
    }
    {
        // an unconjugated circle orbit must not look uniform
        auto& c = res.fiber_control;
        const auto& p = ws.points.front();
        c.point = 0;
        c.kind = "fiber-control";
        c.zbar = p.source.z;
        c.orbit_length = qn;
        PointCloud orb = circle_grid(p.source.z, qn);
        c.ud = trimmed(test_UD_against(orb, ref0[0].sorted, ref0[0].raw, eps_final, nballs,
                                       derive_seed(seed, "fiber-ud"), cfg.ud_radius));
        c.cud = trimmed(test_CUD(orb, res.C0, cfg.cud_eps, nballs, derive_seed(seed, "cud-final")));
        c.pass = c.ud.pass && c.cud.pass;
        if (c.cud.pass)
            res.failures.push_back("negative control: fiber orbit passes cud");
    }
    say("inner induction done: " + std::to_string(res.failures.size()) + " failed checks");
    return res;
}

// ---------------------------------------------------------------- outer loop

ConjugatedRotation RunResult::final_map() const
{
    if (stages.empty())
        return {cfg.d, Chain{}, alpha0};
    return {cfg.d, stages.back().H, stages.back().t_next};
}

RunResult run_outer_loop(const RunConfig& cfg, const Logger& log)
{
    cfg.validate();
    auto say = [&](const std::string& s) {
        if (log)
            log(s);
    };
    RunResult run;
    run.cfg = cfg;
    run.eps0 = cfg.eps0(cfg.epsilon);
    run.alpha0 = rational_near(cfg.t0_value(), run.eps0 / 2, cfg.denominator_cap);
    const int d = cfg.d;
    const auto nballs = static_cast<std::size_t>(cfg.nballs);

    Chain H;
    Rational t = run.alpha0;
    ConjugatedRotation Fprev{d, Chain{}, run.alpha0};
    std::optional<double> C0;
    for (int n = 0; n < cfg.outer_stages; ++n) {
        say("outer stage " + std::to_string(n) + ", alpha_0 = " + t.str());
        OuterStage st;
        st.n = n;
        const double eps_n = cfg.epsilon / std::ldexp(1.0, n);
        const std::uint64_t sseed = derive_seed(cfg.seed, "outer/" + std::to_string(n));
        st.inner = run_inner_induction(t, eps_n, cfg, sseed, C0, log);
        if (!C0)
            C0 = st.inner.C0;
        H = H.then(st.inner.chain());
        st.H = H;
        st.t_next = st.inner.alphas.back();
        ConjugatedRotation F{d, H, st.t_next};

        std::vector<std::int64_t> one{1};
        st.closeness_budget = eps_n;
        st.closeness = sup_distance_powers(F, Fprev, one, cfg.delta, static_cast<std::size_t>(cfg.closeness_samples),
                                           derive_seed(sseed, "outer-closeness"), cfg.ball_norm);
        st.closeness_pass = !st.closeness.overflow() && st.closeness.estimate < eps_n;

        // per-j prefixes of F-orbits through H zbar
        const std::int64_t q = st.t_next.q;
        st.cud_pass = true;
        for (std::size_t k = 0; k < st.inner.ensemble.size(); ++k) {
            SpherePoint x = st.inner.ensemble[k].z;
            if (!H.apply(std::span<Complex>(x.z)))
                throw IntegrityError("overflow while mapping a test point");
            PointCloud orb = orbit(F, x, q);
            std::int64_t prev = 0;
            for (int j = 0; j <= n; ++j) {
                CudPrefixCheck c;
                c.j = j;
                c.point = static_cast<int>(k);
                c.bound = q;
                std::int64_t L = std::max<std::int64_t>(prev, cfg.cud_min_prefix);
                while (true) {
                    std::int64_t len = std::min(L, q);
                    PointCloud pre;
                    pre.dim = orb.dim;
                    pre.x.assign(orb.x.begin(), orb.x.begin() + len * orb.dim);
                    auto rep = test_CUD(pre, *C0, 1.0 / (j + 1), nballs,
                                        derive_seed(sseed, "hn-cud/" + std::to_string(j)));
                    c.worst_ratio = rep.worst_ratio;
                    if (rep.pass && !rep.inconclusive) {
                        c.pass = true;
                        c.prefix = len;
                        break;
                    }
                    if (len == q)
                        break;
                    L *= 2;
                }
                if (!c.pass)
                    st.cud_pass = false;
                prev = c.prefix;
                st.cud.push_back(c);
            }
        }
        {
            std::ostringstream os;
            os << "(H_" << n << ") closeness " << st.closeness.estimate << " (" << st.closeness.overflow_count
               << " overflowed) vs " << eps_n << "; cud " << (st.cud_pass ? "pass" : "fail");
            say(os.str());
        }
        const std::string tag = "stage " + std::to_string(n) + ": ";
        for (const auto& f : st.inner.failures)
            run.failures.push_back(tag + f);
        if (!st.closeness_pass) {
            std::ostringstream os;
            os << tag << "(H_" << n << ") closeness " << st.closeness.estimate << " with "
               << st.closeness.overflow_count << " overflowed samples vs " << eps_n;
            run.failures.push_back(os.str());
        }
        if (!st.cud_pass)
            run.failures.push_back(tag + "(H_" + std::to_string(n) + ") prefix cud check fails");
        Fprev = F;
        t = st.t_next;
        run.stages.push_back(std::move(st));
    }
    run.C0 = C0.value_or(0.0);
    return run;
}

}  // namespace akc
