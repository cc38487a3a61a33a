#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gravphase/core.hpp"
#include "gravphase/moments.hpp"
#include "gravphase/witness.hpp"

namespace gravphase {

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"evolve-quantum", "evolve-classical", "equivalence",
                                                "gaussian",       "witness-wigner",   "witness-weyl",
                                                "sample",         "moments",          "ensemble-2d"};
    return names;
}

struct RunConfig {
    std::string experiment;
    PhysicalParams params;
    std::string potential = "truncated"; // truncated | exact | free

    // grids
    std::size_t n_wave = 2048;
    double wave_n_sigma = 12.0;
    std::size_t n_r = 512;
    std::size_t n_p = 512;
    double n_sigma = 8.0;

    std::vector<double> checkpoints;
    double dt = 0.005;

    std::optional<WitnessConfig> witness;
    bool witness_auto_center = true;

    std::optional<EnsembleConfig> ensemble;

    int gaussian_n1 = 0;
    int gaussian_n2 = 0;

    std::size_t weyl_dim = 24;
    std::string weyl_frame = "interaction"; // interaction | static

    std::size_t sample_count = 1000000;
    std::size_t sample_angles = 1024;
    std::size_t sample_nx = 2048;
    bool sample_export = false;

    bool snapshots = false;
    std::uint64_t seed = 1;
    std::filesystem::path output = "out";
    int threads = 0;

    void validate() const;
};

// Flat "key = value" text; '#' starts a comment; a "[section]" line prefixes
// the following keys with "section.". Unknown keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Resolved settings as sorted "key = value" lines (output directory and
// thread count excluded), the input of the run digest.
std::string canonical_config(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& data);
std::uint64_t config_digest(const RunConfig& cfg);

} // namespace gravphase
