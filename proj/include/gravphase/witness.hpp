#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gravphase/core.hpp"
#include "gravphase/phase_space.hpp"

// Everything here works in dimensionless phase-space units:
// r~ = r / xunit, p~ = p / punit, and fields are stored as hbar * W.

namespace gravphase {

struct WitnessConfig {
    double delta = 0.04;
    double center_r = 0;
    double center_p = 0;

    void validate() const;
};

struct QuadratureSample {
    double phi = 0;
    double x = 0;
};

// Dawson integral F(z) = exp(-z^2) * integral_0^z exp(t^2) dt.
double dawson(double z);

// Gamma_D(y) = (1 - 2 z F(z)) / (2 D^2) with z = y / (sqrt(2) D).
double pattern_function(double y, double delta);

// Integral over u of f(u)^2 where Gamma_D(y) = f(y/D) / D^2.
double pattern_profile_l2();

// Rescales axes to dimensionless units and values to hbar * W.
WignerField to_dimensionless(const WignerField& field, const DerivedScales& s);

// (1/pi) exp(-r^2 - p^2) on `grid`.
WignerField vacuum_field(const PhaseSpaceGrid& grid);

// Probability density of x_phi = r cos(phi) + p sin(phi) on a uniform x grid.
struct QuadratureMarginal {
    double phi = 0;
    double x_min = 0;
    double dx = 0;
    std::vector<double> density;

    double x_at(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
    double mass() const;
    // Cubic interpolation, zero outside the grid.
    double operator()(double x) const;
};

QuadratureMarginal radon_marginal(const WignerField& field, double phi, std::size_t n_x = 2048);

// ∬ G_D W with G_D the normalized isotropic Gaussian of width D at the centre.
double direct_witness(const WignerField& field, const WitnessConfig& cfg);

// Marginals at phi_k = k pi / K for k = 0..K (the last one mirrors phi = 0),
// clipped and renormalized, with cumulative tables for sampling.
class MarginalSet {
public:
    MarginalSet(const WignerField& field, std::size_t n_angles = 1024, std::size_t n_x = 2048);

    std::size_t angles() const { return marginals_.size() - 1; }
    const QuadratureMarginal& marginal(std::size_t k) const { return marginals_[k]; }
    // Density of x_phi at x, linear in phi between stored angles.
    double density(double phi, double x) const;
    // One draw given two uniforms in [0,1).
    QuadratureSample draw(double u_phi, double u_pick, double u_x) const;

private:
    double invert(std::size_t k, double u) const;
    std::vector<QuadratureMarginal> marginals_;
    std::vector<std::vector<double>> cdf_;
};

// Samples are generated in chunks of `chunk` draws; chunk c uses its own
// engine seeded from (seed, c), so the stream does not depend on thread count.
std::vector<QuadratureSample> sample_homodyne(const MarginalSet& marginals, std::size_t count,
                                              std::uint64_t seed, std::size_t chunk = 4096);
std::vector<QuadratureSample> sample_homodyne(const WignerField& field, std::size_t count, std::uint64_t seed,
                                              std::size_t n_angles = 1024, std::size_t n_x = 2048);

struct WitnessEstimate {
    double value = 0;          // mean of Gamma_D / pi
    double standard_error = 0; // of value
    double gamma_variance = 0; // sample variance of the raw Gamma_D
    std::size_t count = 0;
};

WitnessEstimate estimate_witness(const std::vector<QuadratureSample>& samples, const WitnessConfig& cfg);

// Angle-averaged form (1/pi) * mean_phi ∫dx p(x|phi) Gamma_D(x - x_phi(centre)).
double tomographic_witness(const WignerField& field, const WitnessConfig& cfg, std::size_t n_angles = 256,
                           std::size_t n_x = 2048);

// C_Gamma = <p(x_phi(centre)|phi)>_phi * pattern_profile_l2(), so that
// Var(Gamma_D) ~ C_Gamma / D^3.
double c_gamma(const MarginalSet& marginals, const WitnessConfig& cfg);

struct PerturbativeEstimate {
    double epsilon = 0;
    double sigma_r = 0; // dimensionless widths of the initial relative state
    double sigma_p = 0;
    double p0 = 0;        // tail minimum location along r = 0
    double tail_min = 0;  // hbar * W at p0
    std::optional<double> delta_star;
    double n_opt = 0;     // optimal windowed value at delta_star
    double n_opt_p0 = 0;  // centre of that optimum
};

// First-order cubic correction (1 + eps (u^3 - 3u)) exp(-u^2/2) with u = p/sigma_p,
// searched within |u| <= 6. The window enters through sigma_eff^2 = sigma^2 + D^2
// and eps_eff = eps (sigma_p / sigma_p,eff)^3.
PerturbativeEstimate perturbative_wigner(const PhysicalParams& params, double t);

// Windowed first-order value at (0, p0) for window width delta.
double perturbative_windowed(const PhysicalParams& params, double t, double delta, double p0);

// M = (C_Gamma / D^3) / N^2.
double sample_complexity(const WitnessConfig& cfg, double witness_value, double c_gamma_value);

std::string samples_to_csv(const std::vector<QuadratureSample>& samples);

} // namespace gravphase
