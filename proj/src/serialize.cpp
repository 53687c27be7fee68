#include "akc/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace akc {

namespace fs = std::filesystem;

std::string exact(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

double parse_exact(const std::string& s)
{
    if (s == "nan")
        return std::nan("");
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    double out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error("bad decimal '" + s + "'");
    return out;
}

namespace {

// finite doubles as numbers, the rest as strings
json num(double x)
{
    if (std::isfinite(x))
        return x;
    return exact(x);
}

json axes(const std::vector<Axis>& a)
{
    json out = json::array();
    for (const auto& x : a)
        out.push_back(x.str());
    return out;
}

json ball(const BallStat& b)
{
    return {{"center", b.center}, {"radius", b.radius}, {"observed", b.observed},
            {"expected", b.expected}, {"allowance", b.allowance}, {"ok", b.ok}};
}

}  // namespace

json to_json(const Rational& r)
{
    return r.str();
}

json to_json(const TwistMap& t)
{
    return {{"kind", "twist"}, {"axis", t.axis.str()}, {"fn", t.fn.str()}, {"amplitude", exact(t.amplitude)}};
}

json to_json(const Chain& c)
{
    json out = json::array();
    for (const auto& f : c.factors) {
        if (const auto* m = std::get_if<AxisMove>(&f))
            out.push_back({{"kind", "move"}, {"axis", m->axis.str()}, {"s", exact(m->s)}});
        else
            out.push_back(to_json(std::get<TwistMap>(f)));
    }
    return out;
}

json to_json(const SupEstimate& e)
{
    return {{"estimate", num(e.estimate)}, {"count", e.count}, {"seed", e.seed},
            {"overflow_count", e.overflow_count}};
}

json to_json(const DistributionReport& r)
{
    json balls = json::array();
    for (const auto& b : r.balls)
        balls.push_back(ball(b));
    return {{"test", r.test},
            {"params", {{"C", num(r.C)}, {"eps", r.eps}, {"dirs", axes(r.dirs)}, {"nballs", r.nballs}}},
            {"pass", r.pass},
            {"inconclusive", r.inconclusive},
            {"worst_ball", ball(r.worst)},
            {"worst_ratio", num(r.worst_ratio)},
            {"seeds", {{"balls", r.seed}}},
            {"counts", {{"orbit", r.orbit_count}, {"reference", r.reference_count}}},
            {"balls", balls}};
}

json to_json(const TransversalReport& r)
{
    return {{"m", r.index.m},         {"pair", r.index.pair},
            {"dirs", axes(r.dirs)},   {"nu", r.nu},
            {"C", r.C},               {"pass", r.pass},
            {"worst_measure", r.worst_measure}, {"worst_i", r.worst_i},
            {"worst_lambda", r.worst_lambda},   {"nsamples", r.nsamples},
            {"seed", r.seed}};
}

json to_json(const StageRecord& r)
{
    json dist = json::array();
    for (const auto& c : r.distribution)
        dist.push_back({{"point", c.point}, {"report", to_json(c.report)}});
    json tr = json::array();
    for (const auto& c : r.transversality)
        tr.push_back({{"point", c.point}, {"report", to_json(c.report)}});
    json cps = json::array();
    for (const auto& c : r.checkpoints) {
        json x = json::array(), y = json::array();
        for (double v : c.x)
            x.push_back(exact(v));
        for (double v : c.image)
            y.push_back(exact(v));
        cps.push_back({{"x", x}, {"image", y}, {"overflow", c.overflow}});
    }
    json tried = json::array();
    for (double a : r.tried)
        tried.push_back(exact(a));
    return {{"schema_version", kSchemaVersion},
            {"l", r.l},
            {"amplitude", exact(r.amplitude)},
            {"status", to_string(r.status)},
            {"diagnostic", r.diagnostic},
            {"alpha", to_json(r.alpha)},
            {"degree", r.degree},
            {"eps", r.eps},
            {"eps_prev", r.eps_prev},
            {"tried", tried},
            {"closeness",
             {{"budget", r.closeness_budget},
              {"sup", to_json(r.closeness)},
              {"power_max", r.power_max},
              {"power_count", r.power_count},
              {"pass", r.closeness_pass}}},
            {"distribution", dist},
            {"transversality", tr},
            {"transversality_pass", r.transversality_pass},
            {"checkpoints", cps}};
}

json to_json(const PointOutcome& o)
{
    json z = json::array();
    for (const auto& c : o.zbar.z)
        z.push_back(exact(c.real()) + ":" + exact(c.imag()));
    return {{"point", o.point}, {"kind", o.kind},  {"case", o.case1 ? 1 : 2},   {"j", o.j},
            {"entry", o.entry}, {"zbar", z},       {"orbit_length", o.orbit_length},
            {"ud", to_json(o.ud)}, {"cud", to_json(o.cud)}, {"pass", o.pass}};
}

json to_json(const RunConfig& c)
{
    json out = json::object();
    for (const auto& [k, v] : c.to_map())
        out[k] = v;
    return out;
}

Rational rational_from_json(const json& j)
{
    return Rational::parse(j.get<std::string>());
}

TwistMap twist_from_json(const json& j)
{
    TwistMap t;
    t.axis = Axis::parse(j.at("axis").get<std::string>());
    t.fn = Invariant::parse(j.at("fn").get<std::string>());
    t.amplitude = parse_exact(j.at("amplitude").get<std::string>());
    return t;
}

Chain chain_from_json(const json& j)
{
    Chain c;
    for (const auto& f : j) {
        auto kind = f.at("kind").get<std::string>();
        if (kind == "move")
            c.factors.emplace_back(
                AxisMove{Axis::parse(f.at("axis").get<std::string>()), parse_exact(f.at("s").get<std::string>())});
        else if (kind == "twist")
            c.factors.emplace_back(twist_from_json(f));
        else
            throw std::runtime_error("unknown factor kind '" + kind + "'");
    }
    return c;
}

RunConfig config_from_json(const json& j)
{
    std::string text;
    for (const auto& [k, v] : j.items())
        text += k + "=" + v.get<std::string>() + "\n";
    return parse_config(text);
}

json read_json(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot read " + p.string());
    return json::parse(in);
}

void write_json(const fs::path& p, const json& j)
{
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    out << j.dump(1) << "\n";
}

fs::path write_run(const RunResult& run, const fs::path& dir)
{
    fs::create_directories(dir / "stages");
    json stages = json::array();
    long step = 0;
    json stamps = json::object();
    stamps["start"] = step++;
    for (const auto& st : run.stages) {
        const auto& in = st.inner;
        json records = json::array();
        for (const auto& r : in.records) {
            std::string name = "stages/outer" + std::to_string(st.n) + "_slot" + std::to_string(r.l) + ".json";
            write_json(dir / name, to_json(r));
            records.push_back(name);
        }
        stamps["stage" + std::to_string(st.n)] = step++;
        json ladder = json::array();
        for (int l = 0; l <= in.ladder.M(); ++l) {
            const auto& s = in.ladder.slots[static_cast<std::size_t>(l)];
            ladder.push_back({{"l", l},
                              {"axis", s.axis.str()},
                              {"fn", s.fn.str()},
                              {"amplitude", exact(s.amplitude)},
                              {"status", to_string(s.status)}});
        }
        json alphas = json::array();
        for (const auto& a : in.alphas)
            alphas.push_back(to_json(a));
        json outcomes = json::array();
        for (const auto& o : in.outcomes)
            outcomes.push_back(to_json(o));
        json cud = json::array();
        for (const auto& c : st.cud)
            cud.push_back({{"j", c.j}, {"point", c.point}, {"prefix", c.prefix}, {"bound", c.bound},
                           {"pass", c.pass}, {"worst_ratio", num(c.worst_ratio)}});
        json tried = json::array();
        for (auto q : in.next.tried)
            tried.push_back(q);
        json failures = in.failures;
        stages.push_back(
            {{"n", st.n},
             {"epsilon", in.epsilon},
             {"eps0", in.eps0},
             {"t_next", to_json(st.t_next)},
             {"H_factors", st.H.factors.size()},
             {"inner",
              {{"ladder", ladder},
               {"alphas", alphas},
               {"records", records},
               {"next_rational",
                {{"alpha", to_json(in.next.alpha)},
                 {"tried", tried},
                 {"closeness_pass", in.next.closeness_pass},
                 {"orbit_pass", in.next.orbit_pass},
                 {"diagnostic", in.next.diagnostic}}},
               {"closeness_sum", num(in.closeness_sum)},
               {"schedule_pass", in.schedule_pass},
               {"final_closeness", {{"sup", to_json(in.final_closeness)}, {"pass", in.final_closeness_pass}}},
               {"C0", in.C0},
               {"calibration_worst", num(in.calibration_worst)},
               {"outcomes", outcomes},
               {"fiber_control", to_json(in.fiber_control)},
               {"distribution_pass", in.distribution_pass},
               {"failures", failures}}},
             {"H_check",
              {{"closeness", {{"sup", to_json(st.closeness)}, {"budget", st.closeness_budget},
                              {"pass", st.closeness_pass}}},
               {"cud", cud},
               {"cud_pass", st.cud_pass}}},
             {"pass", st.pass()}});
    }
    write_json(dir / "chain.json", {{"schema_version", kSchemaVersion},
                                    {"d", run.cfg.d},
                                    {"alpha", to_json(run.final_map().alpha)},
                                    {"factors", to_json(run.final_map().h)}});
    stamps["end"] = step++;
    json failures = run.failures;
    json manifest = {{"schema_version", kSchemaVersion},
                     {"config_hash", run.cfg.hash()},
                     {"config", to_json(run.cfg)},
                     {"timestamps", stamps},
                     {"module_versions",
                      {{"sphere-geometry", "1.0"},
                       {"translation-groups", "1.0"},
                       {"transitivity-solver", "1.0"},
                       {"equidistribution", "1.0"},
                       {"construction-engine", "1.0"},
                       {"cli-and-reports", "1.0"}}},
                     {"eps0_policy",
                      run.cfg.eps0_policy == Eps0Policy::Desk ? "desk: eps0 = eps/10 in place of eps^100"
                                                              : "paper: eps0 = eps^100"},
                     {"alpha0", to_json(run.alpha0)},
                     {"eps0", run.eps0},
                     {"C0", run.C0},
                     {"chain", "chain.json"},
                     {"stages", stages},
                     {"failures", failures},
                     {"pass", run.pass()}};
    write_json(dir / "manifest.json", manifest);
    return dir / "manifest.json";
}

LoadedRun load_run(const fs::path& manifest_path)
{
    LoadedRun out;
    out.dir = manifest_path.parent_path();
    out.manifest = read_json(manifest_path);
    if (out.manifest.value("schema_version", 0) != kSchemaVersion)
        throw std::runtime_error("unsupported manifest schema");
    out.cfg = config_from_json(out.manifest.at("config"));
    auto chain = read_json(out.dir / out.manifest.at("chain").get<std::string>());
    out.final_map = {chain.at("d").get<int>(), chain_from_json(chain.at("factors")),
                     rational_from_json(chain.at("alpha"))};
    for (const auto& st : out.manifest.at("stages")) {
        const int n = st.at("n").get<int>();
        const auto& ladder = st.at("inner").at("ladder");
        for (const auto& name : st.at("inner").at("records")) {
            auto rec = read_json(out.dir / name.get<std::string>());
            LoadedSlot s;
            s.outer = n;
            s.l = rec.at("l").get<int>();
            const auto& slot = ladder.at(static_cast<std::size_t>(s.l));
            s.twist.axis = Axis::parse(slot.at("axis").get<std::string>());
            s.twist.fn = Invariant::parse(slot.at("fn").get<std::string>());
            s.twist.amplitude = parse_exact(rec.at("amplitude").get<std::string>());
            s.status = slot_status_from(rec.at("status").get<std::string>());
            s.alpha = rational_from_json(rec.at("alpha"));
            for (const auto& c : rec.at("checkpoints")) {
                Checkpoint cp;
                for (const auto& v : c.at("x"))
                    cp.x.push_back(parse_exact(v.get<std::string>()));
                for (const auto& v : c.at("image"))
                    cp.image.push_back(parse_exact(v.get<std::string>()));
                cp.overflow = c.at("overflow").get<bool>();
                s.checkpoints.push_back(std::move(cp));
            }
            out.slots.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace akc
