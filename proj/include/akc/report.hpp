#pragma once

#include "akc/equidistribution.hpp"
#include "akc/serialize.hpp"

#include <filesystem>
#include <string>

namespace akc {

// center_1..center_2d, radius, observed, expected, allowance, ok
void write_ball_csv(const DistributionReport& r, const std::filesystem::path& p);

// One row per final test point of every outer stage.
void write_outcomes_csv(const json& manifest, const std::filesystem::path& p);

// Plain-text summary of a manifest.
std::string summarize(const json& manifest);

}  // namespace akc
