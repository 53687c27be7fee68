#pragma once

#include "akc/chain.hpp"
#include "akc/config.hpp"
#include "akc/engine.hpp"
#include "akc/equidistribution.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace akc {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

std::string exact(double x);  // 17 significant digits
double parse_exact(const std::string& s);

json to_json(const Rational& r);
json to_json(const TwistMap& t);
json to_json(const Chain& c);
json to_json(const SupEstimate& e);
json to_json(const DistributionReport& r);
json to_json(const TransversalReport& r);
json to_json(const StageRecord& r);
json to_json(const PointOutcome& o);
json to_json(const RunConfig& c);

Rational rational_from_json(const json& j);
TwistMap twist_from_json(const json& j);
Chain chain_from_json(const json& j);
RunConfig config_from_json(const json& j);

// Writes manifest.json, chain.json and stages/outer<n>_slot<l>.json under dir.
std::filesystem::path write_run(const RunResult& run, const std::filesystem::path& dir);

struct LoadedSlot {
    int outer = 0;
    int l = 0;
    TwistMap twist;
    SlotStatus status = SlotStatus::Unset;
    Rational alpha;
    std::vector<Checkpoint> checkpoints;
};

struct LoadedRun {
    std::filesystem::path dir;
    json manifest;
    RunConfig cfg;
    ConjugatedRotation final_map;
    std::vector<LoadedSlot> slots;
};

// Throws std::runtime_error when files are missing or malformed.
LoadedRun load_run(const std::filesystem::path& manifest_path);

json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const json& j);

}  // namespace akc
