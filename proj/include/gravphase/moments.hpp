#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gravphase/core.hpp"
#include "gravphase/phase_space.hpp"

namespace gravphase {

// C = <p>^2/m - m omega^2 (<r> - L/2)^2 / 4, conserved under the quadratic potential.
double c_value(const MomentSet& m, const PhysicalParams& params);
std::vector<double> c_witness(const std::vector<MomentSet>& trajectory, const PhysicalParams& params);

// dC/dt = -theta (3 omega^2 / 2L) <r^2> <p> under the cubic truncation.
double c_rate_ehrenfest(const MomentSet& m, const PhysicalParams& params);

// Central differences of C at interior points (one-sided at the ends).
std::vector<double> c_rate_finite_difference(const std::vector<MomentSet>& trajectory, const PhysicalParams& params);

struct ParticleSampling {
    double sigma_x = 0;
    double sigma_y = 0;
    double mean_px = 0;
    double mean_py = 0;
};

// Classical ensemble of planar trajectories for two masses, each initially a
// minimum-uncertainty Gaussian (momentum spread hbar / 2 sigma per axis).
struct EnsembleConfig {
    std::size_t n_traj = 100000;
    std::uint64_t seed = 1;
    int order = 3;
    std::array<ParticleSampling, 2> particles{};
    double t_final = 0;
    double dt = 0;
    std::size_t bootstrap = 200;

    void validate(const PhysicalParams& params) const;
};

struct CorrelatorEstimate {
    double value = 0;
    double standard_error = 0;

    double significance() const { return standard_error > 0 ? value / standard_error : 0.0; }
};

struct CorrelationReport {
    CorrelatorEstimate x1_y2y2; // <x1 y2^2>_c
    CorrelatorEstimate x2_y1y1; // <x2 y1^2>_c
    CorrelatorEstimate dx_y1y2; // <(x2 - x1) y1 y2>_c
    std::size_t n_traj = 0;
    std::size_t steps = 0;
    double max_energy_drift = 0; // max |E(t) - E(0)| over the ensemble-mean initial kinetic + |potential|

    std::string to_text() const;
};

// Final-time displacements (x1, y1, x2, y2) of every trajectory.
std::vector<std::array<double, 4>> ensemble_2d_positions(const EnsembleConfig& cfg, const PhysicalParams& params,
                                                         double* max_energy_drift = nullptr);

CorrelationReport ensemble_2d(const EnsembleConfig& cfg, const PhysicalParams& params);

// Third joint cumulant of (a, b, c) over the sample, optionally on a resampled index set.
double third_cumulant(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c);

} // namespace gravphase
