#include "gravphase/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "fft.hpp"
#include "gravphase/errors.hpp"

namespace gravphase {

namespace {

double reduced_mass(const PotentialSpec& spec) { return spec.params.m / 2.0; }

std::pair<double, double> potential_range(const Grid1D& grid, const PotentialSpec& spec) {
    double lo = spec.value(grid.at(0)), hi = lo;
    for (std::size_t i = 1; i < grid.n; ++i) {
        const double v = spec.value(grid.at(i));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

} // namespace

PhaseStep phase_step(const Grid1D& grid, const PotentialSpec& spec, double dt) {
    const double hbar = spec.params.hbar;
    const double kmax = constants::pi / grid.step();
    PhaseStep s;
    s.kinetic = hbar * kmax * kmax * dt / (2.0 * reduced_mass(spec));
    const auto [lo, hi] = potential_range(grid, spec);
    s.potential = (hi - lo) * dt / hbar;
    return s;
}

double stable_time_step(const Grid1D& grid, const PotentialSpec& spec, double dt_max, double limit) {
    const PhaseStep unit = phase_step(grid, spec, 1.0);
    const double worst = std::max(unit.kinetic, unit.potential);
    return worst > 0 ? std::min(dt_max, 0.99 * limit / worst) : dt_max;
}

void check_grid_overflow(const WavefunctionState& state, std::size_t edge, double tol) {
    const std::size_t n = state.psi.size();
    const std::size_t e = std::min(edge, n / 2);
    const double h = state.grid.step();
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < e; ++i) {
        lo += std::norm(state.psi[i]);
        hi += std::norm(state.psi[n - 1 - i]);
    }
    if (std::max(lo, hi) * h > tol) {
        std::ostringstream msg;
        msg << "grid overflow at t=" << state.t << " s: edge mass " << std::max(lo, hi) * h
            << " exceeds " << tol << "; widen the position grid";
        throw NumericalError(msg.str());
    }
    // The same test at the Nyquist end of the momentum axis, where a drifting
    // packet would otherwise alias back silently.
    std::vector<cplx> spec = state.psi;
    detail::Fft(n).forward(spec);
    double nyq = 0;
    for (std::size_t i = n / 2 - e; i < n / 2 + e; ++i) nyq += std::norm(spec[i]);
    nyq *= h / static_cast<double>(n);
    if (nyq > tol) {
        std::ostringstream msg;
        msg << "momentum overflow at t=" << state.t << " s: mass " << nyq << " near the Nyquist momentum exceeds "
            << tol << "; refine the position grid";
        throw NumericalError(msg.str());
    }
}

std::vector<WavefunctionState> evolve_quantum(const WavefunctionState& state, const PotentialSpec& spec,
                                              double t_final, double dt,
                                              const std::vector<double>& checkpoints) {
    spec.validate();
    if (!(dt > 0)) throw InvalidArgument("dt must be positive");
    if (!(t_final >= state.t)) throw InvalidArgument("t_final precedes the initial time");
    std::vector<double> stops;
    for (double c : checkpoints) {
        if (c < state.t - 1e-12 || c > t_final + 1e-12) throw InvalidArgument("checkpoint outside [t0, t_final]");
        stops.push_back(c);
    }
    std::sort(stops.begin(), stops.end());
    if (stops.empty() || stops.back() < t_final) stops.push_back(t_final);

    const PhaseStep ps = phase_step(state.grid, spec, dt);
    if (ps.kinetic >= 0.1 || ps.potential >= 0.1) {
        std::ostringstream msg;
        msg << "dt=" << dt << " s gives phase steps kinetic=" << ps.kinetic << ", potential=" << ps.potential
            << " rad (limit 0.1)";
        throw InvalidArgument(msg.str());
    }

    const std::size_t n = state.psi.size();
    const double h = state.grid.step();
    const double hbar = spec.params.hbar;
    const double mu = reduced_mass(spec);
    const auto k = detail::wavenumbers(n, h);
    std::vector<double> V(n);
    for (std::size_t i = 0; i < n; ++i) V[i] = spec.value(state.grid.at(i));

    detail::Fft fft(n);
    std::vector<cplx> psi = state.psi;
    std::vector<cplx> kin(n), half(n), full(n);
    std::vector<WavefunctionState> out;
    double t = state.t;
    const double inv_n = 1.0 / static_cast<double>(n);

    for (double stop : stops) {
        const double span = stop - t;
        if (span > 0) {
            const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
            const double step = span / static_cast<double>(steps);
            for (std::size_t i = 0; i < n; ++i) {
                kin[i] = std::polar(inv_n, -hbar * k[i] * k[i] * step / (2.0 * mu));
                half[i] = std::polar(1.0, -V[i] * step / (2.0 * hbar));
                full[i] = half[i] * half[i];
            }
            for (std::size_t i = 0; i < n; ++i) psi[i] *= half[i];
            for (std::size_t s = 0; s < steps; ++s) {
                fft.forward(psi);
                for (std::size_t i = 0; i < n; ++i) psi[i] *= kin[i];
                fft.backward(psi);
                const auto& pot = (s + 1 == steps) ? half : full;
                for (std::size_t i = 0; i < n; ++i) psi[i] *= pot[i];
                if ((s & 255u) == 255u) {
                    WavefunctionState probe{psi, state.grid, t + step * static_cast<double>(s + 1)};
                    check_grid_overflow(probe);
                }
            }
        }
        t = stop;
        WavefunctionState snap{psi, state.grid, t};
        check_grid_overflow(snap);
        out.push_back(std::move(snap));
    }
    return out;
}

MomentumDistribution momentum_distribution(const WavefunctionState& state, double hbar) {
    const std::size_t n = state.psi.size();
    const auto k = detail::wavenumbers(n, state.grid.step());
    std::vector<cplx> phi = state.psi;
    detail::Fft fft(n);
    fft.forward(phi);
    MomentumDistribution d;
    d.p.resize(n);
    d.prob.resize(n);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        d.p[i] = hbar * k[i];
        d.prob[i] = std::norm(phi[i]);
        total += d.prob[i];
    }
    for (auto& v : d.prob) v /= total;
    return d;
}

MomentSet moments(const WavefunctionState& state, double hbar) {
    const std::size_t n = state.psi.size();
    const double norm = state.norm();
    const double h = state.grid.step();
    MomentSet m;
    m.t = state.t;
    for (std::size_t i = 0; i < n; ++i) m.mean_r += std::norm(state.psi[i]) * state.grid.at(i);
    m.mean_r *= h / norm;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = state.grid.at(i) - m.mean_r;
        m.var_r += std::norm(state.psi[i]) * d * d;
    }
    m.var_r *= h / norm;

    const auto dist = momentum_distribution(state, hbar);
    for (std::size_t i = 0; i < n; ++i) m.mean_p += dist.prob[i] * dist.p[i];
    for (std::size_t i = 0; i < n; ++i) {
        const double d = dist.p[i] - m.mean_p;
        m.var_p += dist.prob[i] * d * d;
        m.mu3_p += dist.prob[i] * d * d * d;
    }
    m.skew_p = m.var_p > 0 ? m.mu3_p / std::pow(m.var_p, 1.5) : 0.0;

    // symmetrized covariance Re <psi| (r - <r>)(p - <p>) |psi>
    std::vector<cplx> dpsi = state.psi;
    detail::Fft fft(n);
    fft.forward(dpsi);
    for (std::size_t i = 0; i < n; ++i) dpsi[i] *= (dist.p[i] - m.mean_p) / static_cast<double>(n);
    fft.backward(dpsi);
    double c = 0;
    for (std::size_t i = 0; i < n; ++i)
        c += (std::conj(state.psi[i]) * (state.grid.at(i) - m.mean_r) * dpsi[i]).real();
    m.cov_rp = c * h / norm;
    return m;
}

double energy(const WavefunctionState& state, const PotentialSpec& spec) {
    const double hbar = spec.params.hbar;
    const auto dist = momentum_distribution(state, hbar);
    double kinetic = 0;
    for (std::size_t i = 0; i < dist.p.size(); ++i) kinetic += dist.prob[i] * dist.p[i] * dist.p[i];
    kinetic /= 2.0 * reduced_mass(spec);
    double pot = 0;
    for (std::size_t i = 0; i < state.psi.size(); ++i)
        pot += std::norm(state.psi[i]) * spec.value(state.grid.at(i));
    return kinetic + pot * state.grid.step() / state.norm();
}

WignerField wigner_of(const WavefunctionState& state, const PhaseSpaceGrid& grid, double hbar, bool full_support) {
    grid.validate();
    const std::size_t n = state.psi.size();
    const double h = state.grid.step();

    if (full_support) {
        const auto dist = momentum_distribution(state, hbar);
        double clipped = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (dist.p[i] < grid.p.min || dist.p[i] > grid.p.max) clipped += dist.prob[i];
        if (clipped > 1e-9) {
            std::ostringstream msg;
            msg << "momentum axis clips " << clipped << " of the state's momentum distribution";
            throw NumericalError(msg.str());
        }
    }

    double peak = 0;
    for (const auto& a : state.psi) peak = std::max(peak, std::norm(a));
    long long lo = 0, hi = static_cast<long long>(n) - 1;
    while (lo < hi && std::norm(state.psi[static_cast<std::size_t>(lo)]) < 1e-32 * peak) ++lo;
    while (hi > lo && std::norm(state.psi[static_cast<std::size_t>(hi)]) < 1e-32 * peak) --hi;
    lo = std::max(0LL, lo - 2);
    hi = std::min(static_cast<long long>(n) - 1, hi + 2);

    const std::size_t kmax = n / 2;
    Eigen::MatrixXcd E(grid.p.n, kmax + 1);
    for (std::size_t l = 0; l < grid.p.n; ++l)
        for (std::size_t k = 0; k <= kmax; ++k)
            E(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) =
                std::polar(1.0, -2.0 * grid.p.at(l) * static_cast<double>(k) * h / hbar);

    const auto kw = detail::wavenumbers(n, h);
    std::vector<cplx> spectrum = state.psi;
    {
        detail::Fft fft(n);
        fft.forward(spectrum);
    }

    WignerField W;
    W.grid = grid;
    W.t = state.t;
    W.origin = FieldOrigin::quantum;
    W.values.assign(grid.r.n * grid.p.n, 0.0);
    const double pref = 2.0 * h / (constants::pi * hbar);

#pragma omp parallel
    {
        detail::Fft fft(n);
        std::vector<cplx> shifted(n);
        Eigen::VectorXcd a(kmax + 1);
#pragma omp for schedule(dynamic, 4)
        for (std::size_t i = 0; i < grid.r.n; ++i) {
            const double u = (grid.r.at(i) - state.grid.min) / h;
            const long long i0 = std::llround(u);
            const double delta = (u - static_cast<double>(i0)) * h;
            if (i0 < lo || i0 > hi) continue;
            const long long K = std::min({i0 - lo, hi - i0});
            if (K < 0) continue;
            const std::vector<cplx>* src = &state.psi;
            if (std::abs(delta) > 1e-9 * h) {
                for (std::size_t q = 0; q < n; ++q)
                    shifted[q] = spectrum[q] * std::polar(1.0 / static_cast<double>(n), kw[q] * delta);
                fft.backward(shifted);
                src = &shifted;
            }
            const auto& psi = *src;
            for (long long k = 0; k <= K; ++k)
                a(k) = psi[static_cast<std::size_t>(i0 + k)] * std::conj(psi[static_cast<std::size_t>(i0 - k)]);
            a(0) *= 0.5;
            const Eigen::VectorXcd row = E.leftCols(K + 1) * a.head(K + 1);
            for (std::size_t l = 0; l < grid.p.n; ++l)
                W.values[i * grid.p.n + l] = pref * row(static_cast<Eigen::Index>(l)).real();
        }
    }
    return W;
}

double state_witness(const WavefunctionState& state, const WitnessConfig& cfg, const DerivedScales& scales,
                     std::size_t n) {
    cfg.validate();
    const double half = 9 * cfg.delta;
    const PhaseSpaceGrid patch{{(cfg.center_r - half) * scales.xunit, (cfg.center_r + half) * scales.xunit, n},
                               {(cfg.center_p - half) * scales.punit, (cfg.center_p + half) * scales.punit, n}};
    return direct_witness(to_dimensionless(wigner_of(state, patch, scales.hbar, false), scales), cfg);
}

WitnessConfig optimize_witness_center(const WavefunctionState& state, WitnessConfig cfg, const DerivedScales& scales) {
    cfg.validate();
    auto value = [&](double r, double p) { return state_witness(state, {cfg.delta, r, p}, scales, 64); };
    double best = value(cfg.center_r, cfg.center_p);
    for (double step = 2 * cfg.delta; step >= cfg.delta / 16;) {
        bool moved = false;
        for (auto [dr, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
            const double v = value(cfg.center_r + dr * step, cfg.center_p + dp * step);
            if (v < best) {
                best = v;
                cfg.center_r += dr * step;
                cfg.center_p += dp * step;
                moved = true;
                break;
            }
        }
        if (!moved) step /= 2;
    }
    return cfg;
}

} // namespace gravphase
