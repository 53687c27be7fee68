#pragma once

#include "akc/geometry.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace akc {

// Exit codes: 0 pass, 1 check failure, 2 usage or config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "re:im,re:im,..." with unit norm within tol, returned normalized.
SpherePoint parse_point(const std::string& spec, double tol = 1e-6);

}  // namespace akc
