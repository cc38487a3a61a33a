#pragma once

#include <vector>

#include "gravphase/core.hpp"
#include "gravphase/phase_space.hpp"
#include "gravphase/potential.hpp"
#include "gravphase/witness.hpp"

namespace gravphase {

// Largest phase advance per step of the kinetic and potential factors of one
// split-operator step of size dt on the state's grid.
struct PhaseStep {
    double kinetic = 0;
    double potential = 0;
};
PhaseStep phase_step(const Grid1D& grid, const PotentialSpec& spec, double dt);

// Largest dt (at most dt_max) keeping both phase steps below `limit` radians.
double stable_time_step(const Grid1D& grid, const PotentialSpec& spec, double dt_max,
                        double limit = 0.1);

// Strang-split evolution of the relative wavefunction under p^2/2mu + V(r).
// Returns the state at every checkpoint in [state.t, t_final], plus t_final
// when it is not already the last checkpoint. Each checkpoint interval is
// divided into equal steps no longer than dt.
std::vector<WavefunctionState> evolve_quantum(const WavefunctionState& state, const PotentialSpec& spec,
                                              double t_final, double dt,
                                              const std::vector<double>& checkpoints = {});

// Aborts when more than `tol` probability sits within `edge` points of either
// end of the position grid, or within `edge` bins of the Nyquist momentum.
void check_grid_overflow(const WavefunctionState& state, std::size_t edge = 5, double tol = 1e-9);

double energy(const WavefunctionState& state, const PotentialSpec& spec);

// Momentum-space probability weights on the FFT momentum axis, summing to 1.
struct MomentumDistribution {
    std::vector<double> p;
    std::vector<double> prob;
};
MomentumDistribution momentum_distribution(const WavefunctionState& state, double hbar);

MomentSet moments(const WavefunctionState& state, double hbar);

// W(r, p) = (1/pi hbar) sum_s psi(r + s) psi*(r - s) exp(-2 i p s / hbar) ds,
// with s on the wavefunction lattice. Rows off the lattice use a spectrally
// shifted copy of psi. Unless `full_support` is false (local patches), the p
// axis must hold the whole momentum distribution.
WignerField wigner_of(const WavefunctionState& state, const PhaseSpaceGrid& grid, double hbar,
                      bool full_support = true);

// direct_witness of the dimensionless field of `state`, evaluated on an n x n
// patch of half-width 9 D around the window centre so that the quadrature
// resolves the window independently of any global field grid.
double state_witness(const WavefunctionState& state, const WitnessConfig& cfg, const DerivedScales& scales,
                     std::size_t n = 128);

// Compass search for the window centre minimizing state_witness, starting at
// cfg's centre with steps of 2 D and stopping below D / 16.
WitnessConfig optimize_witness_center(const WavefunctionState& state, WitnessConfig cfg, const DerivedScales& scales);

} // namespace gravphase
