#pragma once

#include <array>
#include <variant>

#include "gravphase/phase_space.hpp"
#include "gravphase/potential.hpp"

namespace gravphase {

// Normalized bivariate Gaussian density on (r, p).
struct GaussianDensity {
    double mean_r = 0;
    double mean_p = 0;
    double var_r = 1;
    double var_p = 1;
    double cov_rp = 0;

    double operator()(double r, double p) const;
};

// Wigner function of the initial relative-mode state, which is Gaussian.
GaussianDensity initial_density(const PhysicalParams& params);

using InitialDensity = std::variant<GaussianDensity, WignerField>;

// Fourth-order symplectic (Yoshida) integrator for H = p^2/2mu + V(r).
// A negative dt integrates backwards.
class CharacteristicFlow {
public:
    explicit CharacteristicFlow(const PotentialSpec& spec);

    void step(double& r, double& p, double dt) const;
    // Integrates over `t` in `steps` equal substeps.
    void advance(double& r, double& p, double t, std::size_t steps) const;
    double hamiltonian(double r, double p) const;
    // Substeps keeping omega*dt below 1e-3 (at least 8).
    std::size_t default_steps(double t) const;

private:
    void verlet(double& r, double& p, double dt) const;
    double dV(double r) const;
    PotentialSpec spec_;
    double mu_;
    std::array<double, 4> dcoef_{};
};

// f(z, t) = f0(Phi_{-t}(z)) on `grid`, where Phi is the Hamiltonian flow of the
// relative motion. Gaussian f0 is evaluated in closed form; a gridded f0 is
// interpolated and treated as zero outside its grid. steps = 0 picks a default.
WignerField evolve_classical(const InitialDensity& f0, const PotentialSpec& spec, double t,
                             const PhaseSpaceGrid& grid, std::size_t steps = 0);

} // namespace gravphase
