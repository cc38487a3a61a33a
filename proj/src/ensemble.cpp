#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "gravphase/errors.hpp"
#include "gravphase/moments.hpp"
#include "gravphase/potential.hpp"

namespace gravphase {

void EnsembleConfig::validate(const PhysicalParams& params) const {
    params.validate();
    if (n_traj < 1000) throw InvalidArgument("ensemble needs at least 1000 trajectories");
    if (order != 2 && order != 3) throw InvalidArgument("ensemble order must be 2 or 3");
    if (!(t_final > 0) || !(dt > 0)) throw InvalidArgument("ensemble t_final and dt must be positive");
    if (bootstrap < 10) throw InvalidArgument("need at least 10 bootstrap resamples");
    for (const auto& p : particles) {
        if (!(p.sigma_x > 0) || !(p.sigma_y > 0)) throw InvalidArgument("ensemble widths must be positive");
        if (p.sigma_x > 0.2 * params.L || p.sigma_y > 0.2 * params.L)
            throw InvalidArgument("ensemble widths must be small compared with L");
    }
}

std::vector<std::array<double, 4>> ensemble_2d_positions(const EnsembleConfig& cfg, const PhysicalParams& params,
                                                         double* max_energy_drift) {
    cfg.validate(params);
    const double m = params.m;
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
    const double h = cfg.t_final / static_cast<double>(steps);
    std::vector<std::array<double, 4>> out(cfg.n_traj);
    double worst = 0, scale_sum = 0;
    bool collided = false;

#pragma omp parallel for schedule(static) reduction(max : worst) reduction(+ : scale_sum)
    for (std::size_t n = 0; n < cfg.n_traj; ++n) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32)};
        std::mt19937_64 eng(seq);
        std::normal_distribution<double> N01(0.0, 1.0);
        std::array<double, 4> q{}, p{};
        for (int k = 0; k < 2; ++k) {
            const auto& s = cfg.particles[k];
            q[2 * k] = s.sigma_x * N01(eng);
            q[2 * k + 1] = s.sigma_y * N01(eng);
            p[2 * k] = s.mean_px + params.hbar / (2.0 * s.sigma_x) * N01(eng);
            p[2 * k + 1] = s.mean_py + params.hbar / (2.0 * s.sigma_y) * N01(eng);
        }
        auto grad = [&](const std::array<double, 4>& x) {
            return v_multipole_2d_gradient({x[0], x[1]}, {x[2], x[3]}, cfg.order, params);
        };
        auto energy = [&](const std::array<double, 4>& x, const std::array<double, 4>& v) {
            double k = 0;
            for (double pi : v) k += pi * pi / (2.0 * m);
            return std::pair{k, v_multipole_2d({x[0], x[1]}, {x[2], x[3]}, cfg.order, params)};
        };
        const auto [k0, v0] = energy(q, p);
        scale_sum += k0 + std::abs(v0);
        auto g = grad(q);
        for (std::size_t s = 0; s < steps; ++s) {
            for (int i = 0; i < 4; ++i) p[i] -= 0.5 * h * g[i];
            for (int i = 0; i < 4; ++i) q[i] += h * p[i] / m;
            if (!(params.L + q[2] - q[0] > 0)) {
                collided = true;
                break;
            }
            g = grad(q);
            for (int i = 0; i < 4; ++i) p[i] -= 0.5 * h * g[i];
        }
        const auto [k1, v1] = energy(q, p);
        worst = std::max(worst, std::abs(k1 + v1 - k0 - v0));
        out[n] = q;
    }
    if (collided) throw NumericalError("trajectory collision: L + x2 - x1 <= 0");
    // per-trajectory scales can be arbitrarily small, so use the ensemble mean
    if (max_energy_drift) *max_energy_drift = worst / (scale_sum / static_cast<double>(cfg.n_traj));
    return out;
}

double third_cumulant(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0, mc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
        mc += c[i];
    }
    ma /= n;
    mb /= n;
    mc /= n;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb) * (c[i] - mc);
    return s / n;
}

CorrelationReport ensemble_2d(const EnsembleConfig& cfg, const PhysicalParams& params) {
    CorrelationReport rep;
    const auto pos = ensemble_2d_positions(cfg, params, &rep.max_energy_drift);
    const std::size_t n = pos.size();
    rep.n_traj = n;
    rep.steps = static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-9));

    std::vector<double> x1(n), y1(n), x2(n), y2(n), dx(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = pos[i][0];
        y1[i] = pos[i][1];
        x2[i] = pos[i][2];
        y2[i] = pos[i][3];
        dx[i] = x2[i] - x1[i];
    }
    rep.x1_y2y2.value = third_cumulant(x1, y2, y2);
    rep.x2_y1y1.value = third_cumulant(x2, y1, y1);
    rep.dx_y1y2.value = third_cumulant(dx, y1, y2);

    std::vector<std::array<double, 3>> boot(cfg.bootstrap);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t b = 0; b < cfg.bootstrap; ++b) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          0xB007u, static_cast<std::uint32_t>(b)};
        std::mt19937_64 eng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<double> a1(n), b1(n), a2(n), b2(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = pick(eng);
            a1[i] = x1[k];
            b1[i] = y1[k];
            a2[i] = x2[k];
            b2[i] = y2[k];
            d[i] = dx[k];
        }
        boot[b] = {third_cumulant(a1, b2, b2), third_cumulant(a2, b1, b1), third_cumulant(d, b1, b2)};
    }
    for (int c = 0; c < 3; ++c) {
        double mean = 0, var = 0;
        for (const auto& v : boot) mean += v[c];
        mean /= static_cast<double>(boot.size());
        for (const auto& v : boot) var += (v[c] - mean) * (v[c] - mean);
        var /= static_cast<double>(boot.size() - 1);
        CorrelatorEstimate& e = c == 0 ? rep.x1_y2y2 : (c == 1 ? rep.x2_y1y1 : rep.dx_y1y2);
        e.standard_error = std::sqrt(var);
    }
    return rep;
}

std::string CorrelationReport::to_text() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "n_traj = %zu\nsteps = %zu\nmax_energy_drift = %.6e\n"
                  "x1_y2y2 = %.10e\nx1_y2y2_se = %.10e\n"
                  "x2_y1y1 = %.10e\nx2_y1y1_se = %.10e\n"
                  "dx_y1y2 = %.10e\ndx_y1y2_se = %.10e\n",
                  n_traj, steps, max_energy_drift, x1_y2y2.value, x1_y2y2.standard_error, x2_y1y1.value,
                  x2_y1y1.standard_error, dx_y1y2.value, dx_y1y2.standard_error);
    return buf;
}

} // namespace gravphase
