#include "akc/report.hpp"

#include <fstream>
#include <sstream>

namespace akc {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p)
{
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::string field(const json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

}  // namespace

void write_ball_csv(const DistributionReport& r, const fs::path& p)
{
    auto out = open_out(p);
    const std::size_t n = r.balls.empty() ? 0 : r.balls.front().center.size();
    for (std::size_t k = 0; k < n; ++k)
        out << "center_" << k + 1 << ",";
    out << "radius,observed,expected,allowance,ok\n";
    for (const auto& b : r.balls) {
        for (double c : b.center)
            out << exact(c) << ",";
        out << exact(b.radius) << "," << exact(b.observed) << "," << exact(b.expected) << ","
            << exact(b.allowance) << "," << (b.ok ? 1 : 0) << "\n";
    }
}

void write_outcomes_csv(const json& manifest, const fs::path& p)
{
    auto out = open_out(p);
    out << "stage,point,kind,case,j,orbit_length,ud_pass,ud_worst_ratio,cud_pass,cud_worst_ratio,pass\n";
    for (const auto& st : manifest.at("stages"))
        for (const auto& o : st.at("inner").at("outcomes"))
            out << st.at("n").get<int>() << "," << o.at("point").get<int>() << "," << field(o.at("kind")) << ","
                << o.at("case").get<int>() << "," << o.at("j").get<int>() << ","
                << o.at("orbit_length").get<long long>() << "," << o.at("ud").at("pass").get<bool>() << ","
                << field(o.at("ud").at("worst_ratio")) << "," << o.at("cud").at("pass").get<bool>() << ","
                << field(o.at("cud").at("worst_ratio")) << "," << o.at("pass").get<bool>() << "\n";
}

std::string summarize(const json& manifest)
{
    std::ostringstream os;
    os << "config " << field(manifest.at("config_hash")).substr(0, 16) << "\n";
    os << field(manifest.at("eps0_policy")) << "\n";
    os << "alpha0 " << field(manifest.at("alpha0")) << ", eps0 " << field(manifest.at("eps0")) << ", C0 "
       << field(manifest.at("C0")) << "\n";
    for (const auto& st : manifest.at("stages")) {
        const auto& in = st.at("inner");
        os << "\nouter stage " << st.at("n").get<int>() << ": t_next " << field(st.at("t_next")) << "\n";
        for (const auto& s : in.at("ladder"))
            os << "  slot " << s.at("l").get<int>() << " " << field(s.at("axis")) << " " << field(s.at("fn"))
               << " A=" << field(s.at("amplitude")) << " " << field(s.at("status")) << "\n";
        std::size_t ok = 0, total = 0;
        for (const auto& o : in.at("outcomes")) {
            ++total;
            ok += o.at("pass").get<bool>() ? 1 : 0;
        }
        os << "  final distribution: " << ok << "/" << total << " points pass\n";
        os << "  closeness sum " << field(in.at("closeness_sum")) << ", schedule "
           << (in.at("schedule_pass").get<bool>() ? "pass" : "fail") << "\n";
        const auto& h = st.at("H_check");
        os << "  (H) closeness " << field(h.at("closeness").at("sup").at("estimate")) << " vs "
           << field(h.at("closeness").at("budget")) << ", overflowed samples "
           << field(h.at("closeness").at("sup").at("overflow_count")) << ", cud "
           << (h.at("cud_pass").get<bool>() ? "pass" : "fail") << "\n";
    }
    os << "\nfailures:\n";
    for (const auto& f : manifest.at("failures"))
        os << "  " << field(f) << "\n";
    os << "overall " << (manifest.at("pass").get<bool>() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

}  // namespace akc
