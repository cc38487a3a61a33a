#include "gravphase/core.hpp"

#include <cmath>

#include "gravphase/errors.hpp"

namespace gravphase {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0; }

} // namespace

void PhysicalParams::validate() const {
    if (!positive_finite(m)) throw InvalidArgument("mass must be positive and finite");
    if (!positive_finite(L)) throw InvalidArgument("separation L must be positive and finite");
    if (!positive_finite(sigma)) throw InvalidArgument("width sigma must be positive and finite");
    if (!positive_finite(G)) throw InvalidArgument("G must be positive and finite");
    if (!positive_finite(hbar)) throw InvalidArgument("hbar must be positive and finite");
    if (!std::isfinite(pbar)) throw InvalidArgument("pbar must be finite");
    if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
    if (N < 0) throw InvalidArgument("truncation order N must be >= 0");
    if (sigma / L > 0.2) throw InvalidArgument("sigma/L > 0.2: the multipole expansion is meaningless");
}

DerivedScales derive_scales(const PhysicalParams& params, double t_ref) {
    params.validate();
    if (!std::isfinite(t_ref) || t_ref < 0) throw InvalidArgument("t_ref must be finite and >= 0");
    DerivedScales s;
    s.hbar = params.hbar;
    s.omega = std::sqrt(4.0 * params.G * params.m / (params.L * params.L * params.L));
    s.mu = params.m / 2.0;
    s.sigma_r = params.sigma * std::sqrt(2.0);
    s.sigma_R = params.sigma / std::sqrt(2.0);
    s.sigma_p = params.hbar / (2.0 * s.sigma_r);
    s.xunit = std::sqrt(params.hbar / (params.m * s.omega));
    s.punit = std::sqrt(params.m * params.hbar * s.omega);
    s.t_ref = t_ref;
    s.epsilon = perturbation_strength(params, t_ref);
    return s;
}

double perturbation_strength(const PhysicalParams& params, double t) {
    const double omega2 = 4.0 * params.G * params.m / (params.L * params.L * params.L);
    const double sigma_p = params.hbar / (2.0 * params.sigma * std::sqrt(2.0));
    return params.hbar * params.hbar * params.m * omega2 * t /
           (16.0 * params.L * sigma_p * sigma_p * sigma_p);
}

Quantity parse_quantity(const std::string& name) {
    if (name == "position") return Quantity::position;
    if (name == "momentum") return Quantity::momentum;
    if (name == "time") return Quantity::time;
    throw InvalidArgument("unknown quantity kind '" + name + "'");
}

static double unit_of(Quantity kind, const DerivedScales& s) {
    switch (kind) {
    case Quantity::position: return s.xunit;
    case Quantity::momentum: return s.punit;
    case Quantity::time: return 1.0 / s.omega;
    }
    throw InvalidArgument("unknown quantity kind");
}

double to_dimensionless(double value, Quantity kind, const DerivedScales& s) {
    return value / unit_of(kind, s);
}

double from_dimensionless(double value, Quantity kind, const DerivedScales& s) {
    return value * unit_of(kind, s);
}

void Grid1D::validate(std::size_t min_points) const {
    if (!std::isfinite(min) || !std::isfinite(max) || !(max > min))
        throw InvalidArgument("grid bounds must be finite with max > min");
    if (n < min_points) throw InvalidArgument("grid has too few points");
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void PhaseSpaceGrid::validate() const {
    r.validate(64);
    p.validate(64);
    if (!is_power_of_two(r.n) || !is_power_of_two(p.n))
        throw InvalidArgument("phase-space grid sizes must be powers of two");
}

double WavefunctionState::norm() const {
    double s = 0;
    for (const auto& a : psi) s += std::norm(a);
    return s * grid.step();
}

double envelope_width(const PhysicalParams& params, double t) {
    const DerivedScales s = derive_scales(params);
    const double free = std::hypot(s.sigma_r, s.sigma_p * t / s.mu);
    return params.N >= 2 ? free * std::cosh(s.omega * t) : free;
}

Grid1D auto_position_grid(const PhysicalParams& params, double t_final, std::size_t n,
                          double n_sigma) {
    if (!is_power_of_two(n) || n < 64) throw InvalidArgument("position grid size must be a power of two >= 64");
    const DerivedScales s = derive_scales(params);
    const double width = envelope_width(params, t_final);
    // mean drift from the initial momentum and from the linear part of the pull
    const double drift = std::abs(params.pbar / s.mu * t_final) +
                         (params.N >= 1 ? 0.25 * s.omega * s.omega * params.L * t_final * t_final : 0.0);
    const double half = n_sigma * width + drift;
    return Grid1D{-half, half, n};
}

WavefunctionState initial_gaussian(const PhysicalParams& params, const Grid1D& grid) {
    grid.validate(64);
    const DerivedScales s = derive_scales(params);
    const double sr = s.sigma_r;
    // mass outside [min, max) of a Gaussian with standard deviation sr
    const double outside = 0.5 * std::erfc(-grid.min / (sr * std::sqrt(2.0))) +
                           0.5 * std::erfc(grid.max / (sr * std::sqrt(2.0)));
    if (outside > 1e-12) throw NumericalError("position grid clips the initial state support");

    WavefunctionState st;
    st.grid = grid;
    st.t = 0;
    st.psi.resize(grid.n);
    const double amp = std::pow(2.0 * constants::pi * sr * sr, -0.25);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double r = grid.at(i);
        st.psi[i] = amp * std::exp(cplx(-r * r / (4.0 * sr * sr), params.pbar * r / params.hbar));
    }
    const double scale = 1.0 / std::sqrt(st.norm());
    for (auto& a : st.psi) a *= scale;
    return st;
}

} // namespace gravphase
