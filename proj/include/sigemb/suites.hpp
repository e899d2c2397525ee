#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sigemb/common.hpp"

namespace sigemb {

struct SuiteResult {
    std::string name;
    int checks = 0;
    int failures = 0;
    std::vector<std::string> notes;
    bool ok() const { return failures == 0 && checks > 0; }
};

// Per-module property suites: the documented invariants of each module run
// programmatically at reduced scale. Names: bandlimited, lattice, interp,
// convexgeom, dynsys, tilingmap, voronoi, welfare, simplicial.
std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

}  // namespace sigemb
