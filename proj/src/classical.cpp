#include "gravphase/classical.hpp"

#include <cmath>
#include <type_traits>

#include "gravphase/errors.hpp"

namespace gravphase {

double GaussianDensity::operator()(double r, double p) const {
    const double det = var_r * var_p - cov_rp * cov_rp;
    const double dr = r - mean_r, dp = p - mean_p;
    const double q = (var_p * dr * dr - 2.0 * cov_rp * dr * dp + var_r * dp * dp) / det;
    return std::exp(-0.5 * q) / (2.0 * constants::pi * std::sqrt(det));
}

GaussianDensity initial_density(const PhysicalParams& params) {
    const DerivedScales s = derive_scales(params);
    GaussianDensity g;
    g.mean_r = 0;
    g.mean_p = params.pbar;
    g.var_r = s.sigma_r * s.sigma_r;
    g.var_p = s.sigma_p * s.sigma_p;
    g.cov_rp = 0;
    return g;
}

CharacteristicFlow::CharacteristicFlow(const PotentialSpec& spec) : spec_(spec), mu_(spec.params.m / 2.0) {
    spec_.validate();
    for (int n = 1; n <= 3; ++n) dcoef_[n - 1] = n * spec_.coefficient(n);
}

double CharacteristicFlow::dV(double r) const {
    if (spec_.kind == PotentialKind::exact) return v_exact_derivative(r, spec_.params);
    return dcoef_[0] + r * (dcoef_[1] + r * dcoef_[2]);
}

double CharacteristicFlow::hamiltonian(double r, double p) const { return p * p / (2.0 * mu_) + spec_.value(r); }

void CharacteristicFlow::verlet(double& r, double& p, double dt) const {
    p -= 0.5 * dt * dV(r);
    r += dt * p / mu_;
    if (!(spec_.params.L + r > 0)) throw NumericalError("characteristic reached the collision region L + r <= 0");
    p -= 0.5 * dt * dV(r);
}

void CharacteristicFlow::step(double& r, double& p, double dt) const {
    static const double cbrt2 = std::cbrt(2.0);
    static const double w1 = 1.0 / (2.0 - cbrt2);
    static const double w0 = -cbrt2 / (2.0 - cbrt2);
    verlet(r, p, w1 * dt);
    verlet(r, p, w0 * dt);
    verlet(r, p, w1 * dt);
}

void CharacteristicFlow::advance(double& r, double& p, double t, std::size_t steps) const {
    if (steps == 0) throw InvalidArgument("need at least one step");
    const double dt = t / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) step(r, p, dt);
}

std::size_t CharacteristicFlow::default_steps(double t) const {
    if (spec_.kind == PotentialKind::free) return 1;
    const double omega = std::sqrt(4.0 * spec_.params.G * spec_.params.m / std::pow(spec_.params.L, 3));
    return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(omega * std::abs(t) / 1e-3)));
}

WignerField evolve_classical(const InitialDensity& f0, const PotentialSpec& spec, double t,
                             const PhaseSpaceGrid& grid, std::size_t steps) {
    grid.validate();
    const CharacteristicFlow flow(spec);
    if (steps == 0) steps = flow.default_steps(t);

    WignerField out;
    out.grid = grid;
    out.origin = FieldOrigin::classical;
    double t0 = 0;
    if (const auto* w = std::get_if<WignerField>(&f0)) t0 = w->t;
    out.t = t0 + t;
    out.values.assign(grid.r.n * grid.p.n, 0.0);

    bool collided = false;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < grid.r.n; ++i) {
        for (std::size_t j = 0; j < grid.p.n; ++j) {
            double r = grid.r.at(i), p = grid.p.at(j);
            try {
                if (t != 0) flow.advance(r, p, -t, steps);
            } catch (const NumericalError&) {
#pragma omp atomic write
                collided = true;
                continue;
            }
            out.values[i * grid.p.n + j] =
                std::visit([&](const auto& f) -> double {
                    using F = std::decay_t<decltype(f)>;
                    if constexpr (std::is_same_v<F, GaussianDensity>) return f(r, p);
                    else return f.interpolate(r, p);
                }, f0);
        }
    }
    if (collided) throw NumericalError("characteristic reached the collision region L + r <= 0");
    return out;
}

} // namespace gravphase
