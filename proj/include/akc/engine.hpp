#pragma once

#include "akc/chain.hpp"
#include "akc/config.hpp"
#include "akc/core.hpp"
#include "akc/equidistribution.hpp"
#include "akc/geometry.hpp"
#include "akc/transitivity.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace akc {

using Logger = std::function<void(const std::string&)>;

enum class SlotStatus { Unset, Ok, Failed };

struct LadderSlot {
    Axis axis;
    Invariant fn;  // fn.degree is q_l once set
    double amplitude = 0.0;
    SlotStatus status = SlotStatus::Unset;
};

struct TwistLadder {
    int d = 2;
    std::vector<LadderSlot> slots;

    int M() const { return 6 * d - 4; }
    TwistMap twist(int l) const;
    // Omitted (zero amplitude) slots become a degree-1 identity twist so that
    // nothing downstream evaluates an unused high-degree invariant.
    TwistMap effective_twist(int l) const;
    std::vector<TwistMap> effective_twists() const;
    // g_from o ... o g_to, skipping omitted slots.
    Chain chain(int from, int to) const;
    Chain chain() const { return chain(0, M()); }
};

TwistLadder build_ladder(int d);

struct EnsemblePoint {
    std::string kind;  // "lebesgue", "z1=0", "z1=zj", "eta-", "eta+"
    SpherePoint z;
};

std::vector<EnsemblePoint> build_ensemble(int d, std::size_t lebesgue, std::uint64_t seed);

// Distribution tolerance for slot l: dist_eps * tighten^(l/M).
std::vector<double> distribution_schedule(int d, double dist_eps, double tighten);

struct PointCheck {
    int point = 0;
    DistributionReport report;  // ball list trimmed to the worst ball
};

struct PointClause {
    int point = 0;
    TransversalReport report;
};

struct Checkpoint {
    std::vector<double> x;
    std::vector<double> image;
    bool overflow = false;
};

struct StageRecord {
    int l = 0;
    double amplitude = 0.0;
    SlotStatus status = SlotStatus::Unset;
    std::string diagnostic;
    Rational alpha;          // alpha_l
    std::int64_t degree = 0; // q_l
    double eps = 0.0;        // distribution tolerance at this slot
    double eps_prev = 0.0;   // tolerance handed to slot l-1
    std::vector<double> tried;
    std::vector<PointCheck> distribution;
    std::vector<PointClause> transversality;
    bool transversality_pass = true;
    // |f_l^i - f_{l-1}^i|_Delta over the tested powers
    double closeness_budget = 0.0;
    SupEstimate closeness;
    std::int64_t power_max = 0;
    std::size_t power_count = 0;
    bool closeness_pass = false;
    std::vector<Checkpoint> checkpoints;
};

// Per ensemble point search state.
struct TrackedPoint {
    EnsemblePoint source;
    bool resolved = false;
    bool case1 = true;
    int j = 0;
    int entry = 0;  // first slot (counting down) where the point is active
    SpherePoint base;
    PointCloud orbit;  // g_{l+1} ... g_M applied to the circle grid through z
};

struct InductionWorkspace {
    RunConfig cfg;
    std::uint64_t seed = 0;
    TwistLadder ladder;
    std::vector<double> eps;
    std::vector<TrackedPoint> points;
    std::vector<int> order;  // test order, last failure first
};

InductionWorkspace make_workspace(const RunConfig& cfg, const Rational& alpha0, std::uint64_t seed,
                                  std::vector<EnsemblePoint> ensemble);

// Direction list [phi, k_l, ..., k_L] for a point at slot l.
std::vector<Axis> point_dirs(const TwistLadder& ladder, const TrackedPoint& p, int l);

struct AmplitudeResult {
    double amplitude = 0.0;
    bool pass = false;
    std::vector<double> tried;
    std::string diagnostic;
    double eps_prev = 0.0;
    std::vector<PointCheck> distribution;
    std::vector<PointClause> transversality;
    bool transversality_pass = true;
};

// Doubling search over A for slot l. Slots above l must be set; the workspace
// orbits are advanced through the accepted twist.
AmplitudeResult choose_amplitude(InductionWorkspace& ws, int l);

struct NextRationalOptions {
    std::int64_t denominator_cap = 10000000;
    std::int64_t power_cap = 10000;
    std::size_t power_extra = 100;
    double delta = 1.05;
    std::size_t count = 256;
    std::uint64_t seed = 0;
    BallNorm norm = BallNorm::Euclidean;
    bool strict = false;
    // monotone in q: once true for q it is assumed true for multiples of q
    std::function<bool(const Rational&)> orbit_ok;
    Logger log;
};

struct NextRationalResult {
    Rational alpha;
    bool closeness_pass = false;
    bool orbit_pass = false;
    SupEstimate closeness;
    std::int64_t power_max = 0;
    std::size_t power_count = 0;
    std::vector<std::int64_t> tried;
    std::string diagnostic;
};

// alpha_{l+1} with q_{l+1} = q_l * 2^k, compared as f_l = G_l phi^{alpha_{l+1}} G_l^{-1}
// against f_{l-1} = G_prev phi^{alpha_l} G_prev^{-1} over powers |i| <= q_l.
NextRationalResult choose_next_rational(const Rational& alpha_l, const Chain& G_prev, const Chain& G_l, int d,
                                        double budget, const NextRationalOptions& opt);

struct PointOutcome {
    int point = 0;
    std::string kind;
    bool case1 = true;
    int j = 0;
    int entry = 0;
    SpherePoint zbar;
    std::int64_t orbit_length = 0;
    DistributionReport ud;
    DistributionReport cud;
    bool pass = false;
};

struct InnerResult {
    int d = 2;
    double epsilon = 0.0;
    double eps0 = 0.0;
    TwistLadder ladder;
    std::vector<Rational> alphas;  // alpha_0 .. alpha_{M+1}
    std::vector<StageRecord> records;
    NextRationalResult next;
    std::vector<EnsemblePoint> ensemble;
    std::vector<PointOutcome> outcomes;
    double calibration_worst = 0.0;
    double C0 = 0.0;
    PointOutcome fiber_control;
    bool distribution_pass = false;
    double closeness_sum = 0.0;
    bool schedule_pass = false;
    SupEstimate final_closeness;
    bool final_closeness_pass = false;
    std::vector<std::string> failures;

    Chain chain() const { return ladder.chain(); }
    ConjugatedRotation final_map() const { return {d, chain(), alphas.back()}; }
    bool pass() const { return failures.empty(); }
};

// C0 given: use it for the final CUD checks. Otherwise measure it.
InnerResult run_inner_induction(const Rational& alpha0, double epsilon, const RunConfig& cfg, std::uint64_t seed,
                                std::optional<double> C0 = std::nullopt, const Logger& log = {});

struct CudPrefixCheck {
    int j = 0;
    int point = 0;
    std::int64_t prefix = 0;  // M'_j(x); 0 if none passed
    std::int64_t bound = 0;   // M_j
    bool pass = false;
    double worst_ratio = 0.0;
};

struct OuterStage {
    int n = 0;
    InnerResult inner;
    Chain H;
    Rational t_next;
    double closeness_budget = 0.0;
    SupEstimate closeness;
    bool closeness_pass = false;
    std::vector<CudPrefixCheck> cud;
    bool cud_pass = false;
    bool pass() const { return closeness_pass && cud_pass && inner.pass(); }
};

struct RunResult {
    RunConfig cfg;
    Rational alpha0;
    double eps0 = 0.0;
    double C0 = 0.0;
    std::vector<OuterStage> stages;
    std::vector<std::string> failures;

    ConjugatedRotation final_map() const;
    bool pass() const { return failures.empty(); }
};

RunResult run_outer_loop(const RunConfig& cfg, const Logger& log = {});

std::string to_string(SlotStatus s);
SlotStatus slot_status_from(const std::string& s);

}  // namespace akc
