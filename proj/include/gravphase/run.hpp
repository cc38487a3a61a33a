#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gravphase/config.hpp"
#include "gravphase/potential.hpp"

namespace gravphase {

struct RunOutcome {
    std::filesystem::path table;                // main CSV series
    std::vector<std::filesystem::path> files;   // everything written, in order
};

PotentialSpec potential_of(const RunConfig& cfg);

// Validates `cfg`, then runs the experiment and writes its outputs below
// cfg.output. Nothing is written when validation fails. Progress goes to `log`.
RunOutcome run(const RunConfig& cfg, std::ostream& log);

} // namespace gravphase
