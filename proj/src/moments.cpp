#include "gravphase/moments.hpp"

#include <cmath>

#include "gravphase/errors.hpp"

namespace gravphase {

namespace {
double omega_squared(const PhysicalParams& p) { return 4.0 * p.G * p.m / std::pow(p.L, 3); }
} // namespace

double c_value(const MomentSet& m, const PhysicalParams& params) {
    const double d = m.mean_r - 0.5 * params.L;
    return m.mean_p * m.mean_p / params.m - 0.25 * params.m * omega_squared(params) * d * d;
}

std::vector<double> c_witness(const std::vector<MomentSet>& trajectory, const PhysicalParams& params) {
    std::vector<double> out;
    out.reserve(trajectory.size());
    for (const auto& m : trajectory) out.push_back(c_value(m, params));
    return out;
}

double c_rate_ehrenfest(const MomentSet& m, const PhysicalParams& params) {
    return -params.theta * 1.5 * omega_squared(params) / params.L * m.second_moment_r() * m.mean_p;
}

std::vector<double> c_rate_finite_difference(const std::vector<MomentSet>& trajectory, const PhysicalParams& params) {
    const std::size_t n = trajectory.size();
    if (n < 2) throw InvalidArgument("need at least two moment sets");
    const auto c = c_witness(trajectory, params);
    std::vector<double> rate(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? n - 1 : i + 1;
        const double dt = trajectory[b].t - trajectory[a].t;
        if (!(dt > 0)) throw InvalidArgument("moment sets must have increasing times");
        rate[i] = (c[b] - c[a]) / dt;
    }
    return rate;
}

} // namespace gravphase
