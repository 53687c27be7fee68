#include "cli.hpp"

#include "akc/balls.hpp"
#include "akc/config.hpp"
#include "akc/engine.hpp"
#include "akc/kernels.hpp"
#include "akc/quad.hpp"
#include "akc/report.hpp"
#include "akc/serialize.hpp"
#include "akc/transitivity.hpp"
#include "akc/translations.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace akc {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

SpherePoint parse_point(const std::string& spec, double tol)
{
    std::vector<Complex> z;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        try {
            if (colon == std::string::npos)
                throw std::invalid_argument("missing ':'");
            std::size_t a = 0, b = 0;
            std::string re = item.substr(0, colon), im = item.substr(colon + 1);
            double x = std::stod(re, &a), y = std::stod(im, &b);
            if (a != re.size() || b != im.size())
                throw std::invalid_argument("trailing characters");
            z.emplace_back(x, y);
        } catch (const std::logic_error&) {
            throw PreconditionError("bad coordinate '" + item + "' (expected re:im)");
        }
    }
    if (z.size() < 2)
        throw PreconditionError("a point needs at least two complex coordinates");
    double n = 0;
    for (const auto& c : z)
        n += std::norm(c);
    if (!std::isfinite(n) || std::abs(n - 1.0) > tol)
        throw PreconditionError("point is not on the unit sphere (|z|^2 = " + exact(n) + ")");
    n = std::sqrt(n);
    for (auto& c : z)
        c /= n;
    return SpherePoint(std::move(z));
}

namespace {

// ---------------------------------------------------------------- helpers

std::string short_hash(const RunConfig& c)
{
    return c.hash().substr(0, 16);
}

bool apply_quad(const Chain& c, std::vector<QComplex>& z, int sign)
{
    std::span<QComplex> s(z);
    auto step = [&](const Factor& f, int sg) {
        if (const auto* m = std::get_if<AxisMove>(&f)) {
            kern::move<QComplex>(s, m->axis, Quad(sg * m->s));
            return true;
        }
        return kern::twist<QComplex>(s, std::get<TwistMap>(f), sg);
    };
    if (sign > 0) {
        for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it)
            if (!step(*it, +1))
                return false;
    } else {
        for (const auto& f : c.factors)
            if (!step(f, -1))
                return false;
    }
    return true;
}

TwistMap effective(TwistMap t)
{
    if (t.amplitude == 0.0)
        t.fn.degree = 1;
    return t;
}

json check_row(const LoadedSlot& s, double value, double tol)
{
    return {{"outer", s.outer}, {"l", s.l}, {"value", exact(value)}, {"tol", tol}, {"pass", value <= tol}};
}

// ---------------------------------------------------------------- batteries

json battery_commutation(const LoadedRun& run)
{
    const int d = run.cfg.d;
    auto samples = lebesgue_sample(d, 64, derive_seed(run.cfg.seed, "verify-commutation"));
    json rows = json::array();
    bool pass = true;
    for (const auto& s : run.slots) {
        double defect = 0.0;
        if (s.twist.amplitude != 0.0)
            defect = check_commutation(s.twist, s.alpha, samples);
        double cp = 0.0;
        TwistMap t = effective(s.twist);
        for (const auto& c : s.checkpoints) {
            auto img = twist_apply(t, SpherePoint::from_real(c.x));
            if (img.overflow != c.overflow) {
                cp = std::numeric_limits<double>::infinity();
                continue;
            }
            auto y = img.value.real_coords();
            for (std::size_t k = 0; k < y.size(); ++k)
                cp = std::max(cp, std::abs(y[k] - c.image[k]));
        }
        json row = check_row(s, defect, 1e-10);
        row["checkpoint_defect"] = exact(cp);
        row["pass"] = defect <= 1e-10 && cp <= 1e-9;
        pass = pass && row["pass"].get<bool>();
        rows.push_back(row);
    }
    return {{"checks", rows}, {"pass", pass}};
}

json battery_inverses(const LoadedRun& run)
{
    const int d = run.cfg.d;
    auto samples = lebesgue_sample(d, 64, derive_seed(run.cfg.seed, "verify-inverses"));
    json rows = json::array();
    bool pass = true;
    for (const auto& s : run.slots) {
        double worst = 0.0;
        if (s.twist.amplitude != 0.0)
            for (const auto& z : samples)
                worst = std::max(worst, twist_roundtrip_defect(s.twist, z));
        auto row = check_row(s, worst, 1e-10);
        pass = pass && row["pass"].get<bool>();
        rows.push_back(row);
    }
    // whole chain, binary128
    double chain_defect = 0.0;
    for (const auto& z : samples) {
        std::vector<QComplex> w(z.z.begin(), z.z.end());
        bool ok = apply_quad(run.final_map.h, w, -1) && apply_quad(run.final_map.h, w, +1);
        if (!ok) {
            chain_defect = std::numeric_limits<double>::infinity();
            break;
        }
        for (std::size_t k = 0; k < w.size(); ++k)
            chain_defect = std::max(chain_defect, static_cast<double>(abs(w[k] - QComplex(z.z[k]))));
    }
    // informational: rounding is amplified by the product of twist Lipschitz constants
    return {{"checks", rows}, {"chain_defect", exact(chain_defect)}, {"pass", pass}};
}

json battery_jacobians(const LoadedRun& run)
{
    const int d = run.cfg.d;
    auto samples = lebesgue_sample(d, 16, derive_seed(run.cfg.seed, "verify-jacobians"));
    json rows = json::array();
    bool pass = true;
    for (const auto& s : run.slots) {
        double worst = 0.0;
        if (s.twist.amplitude != 0.0)
            for (const auto& z : samples)
                worst = std::max(worst, std::abs(std::abs(twist_jacobian(s.twist, z)) - 1.0));
        auto row = check_row(s, worst, 1e-6);
        pass = pass && row["pass"].get<bool>();
        rows.push_back(row);
    }
    return {{"checks", rows}, {"pass", pass}};
}

json battery_periodicity(const LoadedRun& run)
{
    const auto& f = run.final_map;
    auto samples = lebesgue_sample(f.d, 16, derive_seed(run.cfg.seed, "verify-periodicity"));
    double quad = 0.0, dbl = 0.0;
    for (const auto& x : samples) {
        std::vector<QComplex> w(x.z.begin(), x.z.end());
        bool ok = apply_quad(f.h, w, -1);
        kern::rotate<QComplex>(std::span<QComplex>(w), f.alpha, f.alpha.q);
        ok = ok && apply_quad(f.h, w, +1);
        if (!ok) {
            quad = std::numeric_limits<double>::infinity();
            break;
        }
        for (std::size_t k = 0; k < w.size(); ++k)
            quad = std::max(quad, static_cast<double>(abs(w[k] - QComplex(x.z[k]))));
        auto y = evaluate_chain(f, x, f.alpha.q);
        dbl = y.overflow ? std::numeric_limits<double>::infinity() : std::max(dbl, distance(y.value, x));
    }
    return {{"power", f.alpha.q},
            {"defect", exact(quad)},
            {"double_defect", exact(dbl)},
            {"tol", 1e-8},
            {"pass", quad <= 1e-8}};
}

json battery_distribution(const LoadedRun& run)
{
    const auto& m = run.manifest;
    const auto& last = m.at("stages").back();
    const double C0 = m.at("C0").get<double>();
    const auto& f = run.final_map;
    const auto nballs = static_cast<std::size_t>(run.cfg.nballs);
    json rows = json::array();
    bool pass = true;
    double worst_ratio = -1;
    DistributionReport worst;
    for (const auto& o : last.at("inner").at("outcomes")) {
        std::vector<Complex> z;
        for (const auto& c : o.at("zbar")) {
            auto s = c.get<std::string>();
            auto colon = s.find(':');
            z.emplace_back(parse_exact(s.substr(0, colon)), parse_exact(s.substr(colon + 1)));
        }
        SpherePoint x(std::move(z));
        if (!f.h.apply(std::span<Complex>(x.z)))
            throw IntegrityError("overflow while mapping a test point");
        auto rep = test_CUD(orbit(f, x, f.alpha.q), C0, run.cfg.cud_eps, nballs,
                            derive_seed(run.cfg.seed, "verify-cud"));
        bool ok = rep.pass && !rep.inconclusive;
        pass = pass && ok;
        rows.push_back({{"point", o.at("point")}, {"kind", o.at("kind")}, {"worst_ratio", exact(rep.worst_ratio)},
                        {"pass", ok}});
        if (rep.worst_ratio > worst_ratio) {
            worst_ratio = rep.worst_ratio;
            worst = std::move(rep);
        }
    }
    write_ball_csv(worst, run.dir / "verify_distribution_balls.csv");
    return {{"C0", C0}, {"eps", run.cfg.cud_eps}, {"checks", rows}, {"ball_table", "verify_distribution_balls.csv"},
            {"pass", pass}};
}

// ---------------------------------------------------------------- commands

int cmd_construct(const std::string& config_path, std::optional<std::uint64_t> seed, std::string out_dir,
                  bool quiet, std::ostream& out, std::ostream& err)
{
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed)
        cfg.seed = *seed;
    cfg.validate();
    if (out_dir.empty())
        out_dir = "akc-runs/" + short_hash(cfg);
    Logger log;
    if (!quiet)
        log = [&err](const std::string& s) { err << s << std::endl; };
    auto t0 = std::chrono::steady_clock::now();
    RunResult run;
    try {
        run = run_outer_loop(cfg, log);
    } catch (const StageFailure& e) {
        err << "stage failure: " << e.what() << "\n";
        return 1;
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto manifest = write_run(run, out_dir);
    write_json(fs::path(out_dir) / "timing.json", {{"schema_version", kSchemaVersion}, {"wall_seconds", secs}});
    out << manifest.string() << "\n";
    if (!run.pass()) {
        err << "construction finished with " << run.failures.size() << " failed checks:\n";
        for (const auto& f : run.failures)
            err << "  " << f << "\n";
        return 1;
    }
    return 0;
}

LoadedRun load_or_usage(const std::string& path)
{
    if (!fs::exists(path))
        throw UsageError("manifest not found: " + path);
    try {
        return load_run(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("cannot load manifest: ") + e.what());
    }
}

int cmd_verify(const std::string& manifest, const std::string& battery, const std::string& out_path,
               std::ostream& out)
{
    static const std::map<std::string, json (*)(const LoadedRun&)> batteries = {
        {"commutation", battery_commutation}, {"inverses", battery_inverses},
        {"jacobians", battery_jacobians},     {"periodicity", battery_periodicity},
        {"distribution", battery_distribution}};
    auto it = batteries.find(battery);
    if (it == batteries.end())
        throw UsageError("unknown battery '" + battery + "'");
    auto run = load_or_usage(manifest);
    json rep = it->second(run);
    json doc = {{"schema_version", kSchemaVersion}, {"battery", battery}};
    doc.update(rep);
    fs::path p = out_path.empty() ? run.dir / ("verify_" + battery + ".json") : fs::path(out_path);
    write_json(p, doc);
    bool pass = doc.at("pass").get<bool>();
    out << battery << ": " << (pass ? "pass" : "fail") << " (" << p.string() << ")\n";
    return pass ? 0 : 1;
}

int cmd_orbit(const std::string& manifest, const std::string& point, std::int64_t length,
              const std::string& out_path, std::ostream& out)
{
    if (length < 1)
        throw UsageError("--length must be >= 1");
    auto run = load_or_usage(manifest);
    SpherePoint x;
    try {
        x = parse_point(point);
    } catch (const PreconditionError& e) {
        throw UsageError(e.what());
    }
    const auto& f = run.final_map;
    if (x.dim() != f.d)
        throw UsageError("point dimension does not match the run");
    PointCloud orb = orbit(f, x, length);
    auto ref = sort_cloud(lebesgue_cloud(f.d, 1u << 14, derive_seed(run.cfg.seed, "orbit-reference")));
    auto near = nearest_distance(ref, orb);
    std::ofstream file;
    std::ostream* os = &out;
    if (!out_path.empty()) {
        if (fs::path(out_path).has_parent_path())
            fs::create_directories(fs::path(out_path).parent_path());
        file.open(out_path);
        if (!file)
            throw UsageError("cannot write " + out_path);
        os = &file;
    }
    *os << "step";
    for (int k = 1; k <= orb.dim; ++k)
        *os << ",x_" << k;
    *os << ",nearest_ref_dist\n";
    for (std::size_t m = 0; m < orb.size(); ++m) {
        *os << m + 1;
        for (int k = 0; k < orb.dim; ++k)
            *os << "," << exact(orb.at(m)[k]);
        *os << "," << exact(near[m]) << "\n";
    }
    return 0;
}

int cmd_solve(const std::string& point, const std::string& target, const std::string& out_path, std::ostream& out)
{
    SpherePoint z, w;
    try {
        z = parse_point(point);
        w = parse_point(target);
    } catch (const PreconditionError& e) {
        throw UsageError(e.what());
    }
    if (z.dim() != w.dim())
        throw UsageError("point and target dimensions differ");
    auto seq = realize_point(z, w);
    double defect = distance(seq.apply(z), w);
    json moves = json::array();
    for (const auto& m : seq.moves)
        moves.push_back({{"axis", m.axis.str()}, {"s", exact(m.s)}});
    json doc = {{"schema_version", kSchemaVersion}, {"moves", moves}, {"defect", exact(defect)}};
    if (out_path.empty())
        out << doc.dump(1) << "\n";
    else
        write_json(out_path, doc);
    return defect <= 1e-6 ? 0 : 1;
}

int cmd_report(const std::string& manifest, const std::string& out_dir, std::ostream& out)
{
    auto run = load_or_usage(manifest);
    fs::path dir = out_dir.empty() ? run.dir : fs::path(out_dir);
    std::string text = summarize(run.manifest);
    fs::create_directories(dir);
    std::ofstream(dir / "summary.txt") << text;
    write_outcomes_csv(run.manifest, dir / "outcomes.csv");
    out << text;
    return run.manifest.at("pass").get<bool>() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"akc: conjugation constructions on odd spheres"};
    app.require_subcommand(1);

    std::string config_path, out_dir, manifest, battery, point, target;
    std::uint64_t seed_value = 0;
    std::int64_t length = 0;
    bool quiet = false;

    auto* construct = app.add_subcommand("construct", "run the construction and write a manifest");
    construct->add_option("--config", config_path, "key=value config file");
    auto* seed_opt = construct->add_option("--seed", seed_value, "master seed");
    construct->add_option("--out", out_dir, "output directory");
    construct->add_flag("--quiet", quiet, "no progress output");

    auto* verify = app.add_subcommand("verify", "re-run an invariant battery on a stored run");
    verify->add_option("manifest", manifest, "manifest.json")->required();
    verify->add_option("--battery", battery, "commutation|inverses|jacobians|periodicity|distribution")->required();
    verify->add_option("--out", out_dir, "report path");

    auto* orbit_cmd = app.add_subcommand("orbit", "dump an orbit of the final map as CSV");
    orbit_cmd->add_option("manifest", manifest, "manifest.json")->required();
    orbit_cmd->add_option("--point", point, "re:im,re:im,...")->required();
    orbit_cmd->add_option("--length", length, "number of steps")->required();
    orbit_cmd->add_option("--out", out_dir, "CSV path (stdout if omitted)");

    auto* solve = app.add_subcommand("solve-transitivity", "move sequence taking a point to a target");
    solve->add_option("--point", point, "re:im,re:im,...")->required();
    solve->add_option("--target", target, "re:im,re:im,...")->required();
    solve->add_option("--out", out_dir, "JSON path (stdout if omitted)");

    auto* report = app.add_subcommand("report", "summary text and outcome CSV for a run");
    report->add_option("manifest", manifest, "manifest.json")->required();
    report->add_option("--out", out_dir, "output directory");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (*construct)
            return cmd_construct(config_path, *seed_opt ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                                 out_dir, quiet, out, err);
        if (*verify)
            return cmd_verify(manifest, battery, out_dir, out);
        if (*orbit_cmd)
            return cmd_orbit(manifest, point, length, out_dir, out);
        if (*solve)
            return cmd_solve(point, target, out_dir, out);
        if (*report)
            return cmd_report(manifest, out_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace akc
