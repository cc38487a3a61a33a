#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace gravphase {

using cplx = std::complex<double>;

namespace constants {
inline constexpr double G = 6.67430e-11;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double pi = 3.14159265358979323846;
} // namespace constants

// Two identical spheres of mass m a distance L apart, each prepared in a
// Gaussian of width sigma. Only the relative coordinate r is simulated.
struct PhysicalParams {
    double m = 0.5e-15;
    double L = 470e-9;
    double sigma = 40e-9;
    double pbar = 0.0;
    double G = constants::G;
    double hbar = constants::hbar;
    int N = 3;
    double theta = 1.0;

    void validate() const;
};

struct DerivedScales {
    double omega = 0;
    double mu = 0;
    double sigma_r = 0;
    double sigma_R = 0;
    double sigma_p = 0;
    double xunit = 0;
    double punit = 0;
    double epsilon = 0;
    double t_ref = 0;
    double hbar = 0;
};

DerivedScales derive_scales(const PhysicalParams& params, double t_ref = 0.0);

// Strength of the first-order cubic correction to the Wigner function,
// eps = hbar^2 m omega^2 t / (16 L sigma_p^3) with sigma_p the relative width.
double perturbation_strength(const PhysicalParams& params, double t);

enum class Quantity { position, momentum, time };

Quantity parse_quantity(const std::string& name);
double to_dimensionless(double value, Quantity kind, const DerivedScales& s);
double from_dimensionless(double value, Quantity kind, const DerivedScales& s);

// Uniform periodic axis: n points min + i*(max-min)/n, the endpoint excluded.
struct Grid1D {
    double min = 0;
    double max = 0;
    std::size_t n = 0;

    double step() const { return (max - min) / static_cast<double>(n); }
    double at(std::size_t i) const { return min + static_cast<double>(i) * step(); }
    void validate(std::size_t min_points = 2) const;
};

struct PhaseSpaceGrid {
    Grid1D r;
    Grid1D p;

    void validate() const;
};

bool is_power_of_two(std::size_t n);

struct WavefunctionState {
    std::vector<cplx> psi;
    Grid1D grid;
    double t = 0;

    double norm() const;
};

// Half-width of the relative wavepacket at time t, including the
// hyperbolic spreading caused by the inverted quadratic term.
double envelope_width(const PhysicalParams& params, double t);

// Position grid for the relative wavefunction, centred on r = 0.
Grid1D auto_position_grid(const PhysicalParams& params, double t_final,
                          std::size_t n = 2048, double n_sigma = 12.0);

WavefunctionState initial_gaussian(const PhysicalParams& params, const Grid1D& grid);

} // namespace gravphase
