#include "cli.hpp"

#include "akc/serialize.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace akc;
namespace fs = std::filesystem;

namespace {

const char* kTiny = R"(# small enough for a unit test
ensemble_size=3
search_orbit_len=2048
reference_points=20000
nballs=24
closeness_samples=8
power_cap=64
power_extra=4
transversal_samples=256
amplitude_cap=256
denominator_cap=4096
cud_min_prefix=64
)";

struct Out {
    int rc;
    std::string out, err;
};

Out cli(std::vector<std::string> args)
{
    std::ostringstream o, e;
    int rc = run_cli(args, o, e);
    return {rc, o.str(), e.str()};
}

fs::path scratch()
{
    static fs::path dir = [] {
        auto p = fs::temp_directory_path() / ("akc_cli_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text)
{
    auto p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

// one small run shared by the tests below
fs::path tiny_run()
{
    static fs::path manifest = [] {
        auto cfg = write_file("tiny.cfg", kTiny);
        auto r = cli({"construct", "--config", cfg.string(), "--out", (scratch() / "run").string(), "--quiet"});
        REQUIRE((r.rc == 0 || r.rc == 1));
        return scratch() / "run" / "manifest.json";
    }();
    return manifest;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("point parsing")
{
    auto z = parse_point("0.6:0,0:0.8");
    REQUIRE(z.dim() == 2);
    CHECK(z.z[1].imag() == doctest::Approx(0.8));
    CHECK_THROWS_AS(parse_point("0.6:0,0:0.9"), PreconditionError);
    CHECK_THROWS_AS(parse_point("0.6,0.8"), PreconditionError);
    CHECK_THROWS_AS(parse_point("1:0"), PreconditionError);
    CHECK_THROWS_AS(parse_point("0.6x:0,0:0.8"), PreconditionError);
}

TEST_CASE("config errors exit with code 2")
{
    auto bad_d = write_file("d1.cfg", "d=1\n");
    CHECK(cli({"construct", "--config", bad_d.string(), "--quiet"}).rc == 2);
    auto unknown = write_file("unknown.cfg", "colour=blue\n");
    auto r = cli({"construct", "--config", unknown.string(), "--quiet"});
    CHECK(r.rc == 2);
    CHECK(r.err.find("colour") != std::string::npos);
    CHECK(cli({"frobnicate"}).rc == 2);
}

TEST_CASE("solve-transitivity reports moves and defect")
{
    auto r = cli({"solve-transitivity", "--point", "0.6:0,0:0.8", "--target", "0:1,0:0"});
    REQUIRE(r.rc == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("moves").size() == 7);
    CHECK(parse_exact(doc.at("defect").get<std::string>()) <= 1e-6);
    CHECK(cli({"solve-transitivity", "--point", "0.6:0,0:0.8", "--target", "1:0,0:0,0:0"}).rc == 2);
}

TEST_CASE("construct writes a complete, reproducible run directory")
{
    auto m = tiny_run();
    REQUIRE(fs::exists(m));
    auto dir = m.parent_path();
    CHECK(fs::exists(dir / "chain.json"));
    CHECK(fs::exists(dir / "timing.json"));
    CHECK(fs::exists(dir / "stages" / "outer0_slot0.json"));
    auto doc = read_json(m);
    CHECK(doc.at("schema_version") == kSchemaVersion);
    CHECK(doc.at("config_hash").get<std::string>().size() == 64);

    auto cfg = scratch() / "tiny.cfg";
    auto again = scratch() / "again";
    cli({"construct", "--config", cfg.string(), "--out", again.string(), "--quiet"});
    CHECK(slurp(m) == slurp(again / "manifest.json"));
    CHECK(slurp(dir / "chain.json") == slurp(again / "chain.json"));
}

TEST_CASE("verify: usage errors")
{
    auto m = tiny_run();
    CHECK(cli({"verify", m.string(), "--battery", "astrology"}).rc == 2);
    CHECK(cli({"verify", (scratch() / "nope.json").string(), "--battery", "inverses"}).rc == 2);
}

TEST_CASE("verify: inverse, jacobian and commutation batteries pass on a fresh run")
{
    auto m = tiny_run();
    for (const char* b : {"inverses", "jacobians", "commutation"}) {
        auto r = cli({"verify", m.string(), "--battery", b});
        CHECK_MESSAGE(r.rc == 0, b);
        CHECK(fs::exists(m.parent_path() / (std::string("verify_") + b + ".json")));
    }
}

TEST_CASE("verify: a corrupted amplitude is caught by the commutation battery")
{
    auto src = tiny_run().parent_path();
    auto dst = scratch() / "corrupt";
    fs::remove_all(dst);
    fs::copy(src, dst, fs::copy_options::recursive);
    auto slot = dst / "stages" / "outer0_slot4.json";
    auto rec = read_json(slot);
    double a = parse_exact(rec.at("amplitude").get<std::string>());
    rec["amplitude"] = exact(a * 1.5 + 1);
    write_json(slot, rec);
    auto r = cli({"verify", (dst / "manifest.json").string(), "--battery", "commutation"});
    CHECK(r.rc == 1);
    auto doc = read_json(dst / "verify_commutation.json");
    CHECK_FALSE(doc.at("pass").get<bool>());
}

TEST_CASE("orbit CSV has the documented header and one row per step")
{
    auto m = tiny_run();
    auto csv = scratch() / "orbit.csv";
    auto r = cli({"orbit", m.string(), "--point", "0.6:0,0:0.8", "--length", "50", "--out", csv.string()});
    REQUIRE(r.rc == 0);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,x_1,x_2,x_3,x_4,nearest_ref_dist");
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 50);
    CHECK(cli({"orbit", m.string(), "--point", "0.6:0,0:0.8", "--length", "0"}).rc == 2);
    CHECK(cli({"orbit", m.string(), "--point", "1:0,0:0,0:0", "--length", "3"}).rc == 2);
}

TEST_CASE("report writes summary and outcome table")
{
    auto m = tiny_run();
    auto out = scratch() / "report";
    auto r = cli({"report", m.string(), "--out", out.string()});
    CHECK((r.rc == 0 || r.rc == 1));
    CHECK(fs::exists(out / "summary.txt"));
    std::ifstream in(out / "outcomes.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("stage,point,kind,case", 0) == 0);
}
