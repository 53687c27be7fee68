#include "akc/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace akc {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::int64_t to_int(const std::string& key, const std::string& v)
{
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size())
            throw ConfigError(key + ": trailing characters in '" + v + "'");
        return out;
    } catch (const std::logic_error&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

std::string fmt(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

void RunConfig::validate() const
{
    if (d < 2)
        throw ConfigError("d must be >= 2");
    double t = t0_value();
    if (!(t >= 0.0 && t < 1.0))
        throw ConfigError("t0 must lie in [0,1)");
    if (!(epsilon > 0.0))
        throw ConfigError("epsilon must be positive");
    if (!(delta > 0.0))
        throw ConfigError("delta must be positive");
    if (outer_stages < 1)
        throw ConfigError("outer_stages must be >= 1");
    if (power_cap < 1 || power_extra < 0 || denominator_cap < 2 || !(amplitude_cap >= 1.0) || degree_cap < 1)
        throw ConfigError("caps must be positive");
    if (closeness_samples < 1 || nballs < 1 || search_orbit_len < 2 || reference_points < 1000
        || transversal_samples < 1 || ensemble_size < 0 || cud_min_prefix < 1)
        throw ConfigError("sample counts must be positive");
    if (!(dist_eps > 0.0 && dist_eps < 1.0) || !(dist_tighten > 0.0 && dist_tighten <= 1.0))
        throw ConfigError("dist_eps must lie in (0,1) and dist_tighten in (0,1]");
    if (!(cud_eps > 0.0) || !(transversal_C > 0.0) || !(ud_radius > 0.0))
        throw ConfigError("cud_eps, ud_radius and transversal_C must be positive");
}

double RunConfig::eps0(double eps) const
{
    return eps0_policy == Eps0Policy::Paper ? std::pow(eps, 100.0) : eps / 10.0;
}

double RunConfig::t0_value() const
{
    if (t0.find('/') != std::string::npos) {
        try {
            auto slash = t0.find('/');
            double p = to_double("t0", t0.substr(0, slash));
            double q = to_double("t0", t0.substr(slash + 1));
            if (!(q > 0))
                throw ConfigError("t0: denominator must be positive");
            return p / q;
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("t0: ") + e.what());
        }
    }
    return to_double("t0", t0);
}

std::map<std::string, std::string> RunConfig::to_map() const
{
    return {
        {"d", std::to_string(d)},
        {"t0", t0},
        {"epsilon", fmt(epsilon)},
        {"delta", fmt(delta)},
        {"outer_stages", std::to_string(outer_stages)},
        {"power_cap", std::to_string(power_cap)},
        {"power_extra", std::to_string(power_extra)},
        {"denominator_cap", std::to_string(denominator_cap)},
        {"amplitude_cap", fmt(amplitude_cap)},
        {"degree_cap", std::to_string(degree_cap)},
        {"seed", std::to_string(seed)},
        {"eps0_policy", eps0_policy == Eps0Policy::Paper ? "paper" : "desk"},
        {"ball_norm", ball_norm == BallNorm::Max ? "max" : "euclidean"},
        {"closeness_policy", closeness_policy == ClosenessPolicy::Enforce ? "enforce" : "record"},
        {"closeness_samples", std::to_string(closeness_samples)},
        {"dist_eps", fmt(dist_eps)},
        {"dist_tighten", fmt(dist_tighten)},
        {"ud_radius", fmt(ud_radius)},
        {"cud_eps", fmt(cud_eps)},
        {"nballs", std::to_string(nballs)},
        {"search_orbit_len", std::to_string(search_orbit_len)},
        {"reference_points", std::to_string(reference_points)},
        {"transversal_C", fmt(transversal_C)},
        {"transversal_samples", std::to_string(transversal_samples)},
        {"ensemble_size", std::to_string(ensemble_size)},
        {"cud_min_prefix", std::to_string(cud_min_prefix)},
    };
}

std::string RunConfig::canonical() const
{
    std::string out;
    for (const auto& [k, v] : to_map())
        out += k + "=" + v + "\n";
    return out;
}

std::string RunConfig::hash() const
{
    return sha256_hex(canonical());
}

RunConfig parse_config(const std::string& text)
{
    RunConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"d", [&](auto& k, auto& v) { c.d = static_cast<int>(to_int(k, v)); }},
        {"t0", [&](auto&, auto& v) { c.t0 = v; }},
        {"epsilon", [&](auto& k, auto& v) { c.epsilon = to_double(k, v); }},
        {"delta", [&](auto& k, auto& v) { c.delta = to_double(k, v); }},
        {"outer_stages", [&](auto& k, auto& v) { c.outer_stages = static_cast<int>(to_int(k, v)); }},
        {"power_cap", [&](auto& k, auto& v) { c.power_cap = to_int(k, v); }},
        {"power_extra", [&](auto& k, auto& v) { c.power_extra = to_int(k, v); }},
        {"denominator_cap", [&](auto& k, auto& v) { c.denominator_cap = to_int(k, v); }},
        {"amplitude_cap", [&](auto& k, auto& v) { c.amplitude_cap = to_double(k, v); }},
        {"degree_cap", [&](auto& k, auto& v) { c.degree_cap = to_int(k, v); }},
        {"seed", [&](auto& k, auto& v) { c.seed = to_u64(k, v); }},
        {"eps0_policy",
         [&](auto& k, auto& v) {
             if (v == "desk")
                 c.eps0_policy = Eps0Policy::Desk;
             else if (v == "paper")
                 c.eps0_policy = Eps0Policy::Paper;
             else
                 throw ConfigError(k + ": expected desk or paper");
         }},
        {"ball_norm",
         [&](auto& k, auto& v) {
             if (v == "euclidean")
                 c.ball_norm = BallNorm::Euclidean;
             else if (v == "max")
                 c.ball_norm = BallNorm::Max;
             else
                 throw ConfigError(k + ": expected euclidean or max");
         }},
        {"closeness_policy",
         [&](auto& k, auto& v) {
             if (v == "record")
                 c.closeness_policy = ClosenessPolicy::Record;
             else if (v == "enforce")
                 c.closeness_policy = ClosenessPolicy::Enforce;
             else
                 throw ConfigError(k + ": expected record or enforce");
         }},
        {"closeness_samples", [&](auto& k, auto& v) { c.closeness_samples = to_int(k, v); }},
        {"dist_eps", [&](auto& k, auto& v) { c.dist_eps = to_double(k, v); }},
        {"dist_tighten", [&](auto& k, auto& v) { c.dist_tighten = to_double(k, v); }},
        {"cud_eps", [&](auto& k, auto& v) { c.cud_eps = to_double(k, v); }},
        {"ud_radius", [&](auto& k, auto& v) { c.ud_radius = to_double(k, v); }},
        {"nballs", [&](auto& k, auto& v) { c.nballs = to_int(k, v); }},
        {"search_orbit_len", [&](auto& k, auto& v) { c.search_orbit_len = to_int(k, v); }},
        {"reference_points", [&](auto& k, auto& v) { c.reference_points = to_int(k, v); }},
        {"transversal_C", [&](auto& k, auto& v) { c.transversal_C = to_double(k, v); }},
        {"transversal_samples", [&](auto& k, auto& v) { c.transversal_samples = to_int(k, v); }},
        {"ensemble_size", [&](auto& k, auto& v) { c.ensemble_size = to_int(k, v); }},
        {"cud_min_prefix", [&](auto& k, auto& v) { c.cud_min_prefix = to_int(k, v); }},
    };
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(key, val);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

}  // namespace akc
