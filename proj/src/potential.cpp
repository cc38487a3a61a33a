#include "gravphase/potential.hpp"

#include <cmath>

#include "gravphase/errors.hpp"

namespace gravphase {

namespace {

double omega_squared(const PhysicalParams& p) { return 4.0 * p.G * p.m / (p.L * p.L * p.L); }

} // namespace

PotentialSpec PotentialSpec::free(const PhysicalParams& p) {
    PotentialSpec s;
    s.kind = PotentialKind::free;
    s.N = 0;
    s.theta = 0;
    s.params = p;
    return s;
}

PotentialSpec PotentialSpec::exact(const PhysicalParams& p) {
    PotentialSpec s;
    s.kind = PotentialKind::exact;
    s.N = p.N;
    s.theta = p.theta;
    s.params = p;
    return s;
}

PotentialSpec PotentialSpec::truncated(const PhysicalParams& p) { return truncated(p, p.N, p.theta); }

PotentialSpec PotentialSpec::truncated(const PhysicalParams& p, int N, double theta) {
    PotentialSpec s;
    s.kind = PotentialKind::truncated;
    s.N = N;
    s.theta = theta;
    s.params = p;
    s.params.N = N;
    s.params.theta = theta;
    s.validate();
    return s;
}

void PotentialSpec::validate() const {
    params.validate();
    if (kind == PotentialKind::truncated && (N < 0 || N > 3))
        throw InvalidArgument("truncated potential supports 0 <= N <= 3");
}

double PotentialSpec::coefficient(int n) const {
    if (kind != PotentialKind::truncated || n < 0 || n > N) return 0.0;
    const double w2 = omega_squared(params);
    const double c = -0.25 * params.m * w2 * std::pow(-1.0, n) * std::pow(params.L, 2 - n);
    return n == 3 ? theta * c : c;
}

double PotentialSpec::quadratic_coefficient() const {
    switch (kind) {
    case PotentialKind::free: return 0.0;
    case PotentialKind::exact: return -0.25 * params.m * omega_squared(params);
    case PotentialKind::truncated: return coefficient(2);
    }
    return 0.0;
}

double PotentialSpec::value(double r) const {
    switch (kind) {
    case PotentialKind::free: return 0.0;
    case PotentialKind::exact: return v_exact(r, params);
    case PotentialKind::truncated: {
        double v = 0;
        for (int n = N; n >= 0; --n) v = v * r + coefficient(n);
        return v;
    }
    }
    return 0.0;
}

double PotentialSpec::derivative(double r) const {
    switch (kind) {
    case PotentialKind::free: return 0.0;
    case PotentialKind::exact: return v_exact_derivative(r, params);
    case PotentialKind::truncated: {
        double d = 0;
        for (int n = N; n >= 1; --n) d = d * r + n * coefficient(n);
        return d;
    }
    }
    return 0.0;
}

double v_exact(double r, const PhysicalParams& params) {
    const double d = params.L + r;
    if (!(d > 0)) throw NumericalError("collision: L + r <= 0");
    return -params.G * params.m * params.m / d;
}

double v_exact_derivative(double r, const PhysicalParams& params) {
    const double d = params.L + r;
    if (!(d > 0)) throw NumericalError("collision: L + r <= 0");
    return params.G * params.m * params.m / (d * d);
}

double v_truncated(double r, const PotentialSpec& spec) {
    if (spec.kind != PotentialKind::truncated) throw InvalidArgument("v_truncated needs a truncated spec");
    return spec.value(r);
}

double v_multipole_2d(const Vec2& r1, const Vec2& r2, int order, const PhysicalParams& params) {
    if (order != 2 && order != 3) throw InvalidArgument("multipole order must be 2 or 3");
    const double mw2 = params.m * omega_squared(params);
    const auto [x1, y1] = r1;
    const auto [x2, y2] = r2;
    double v = 0.5 * mw2 * (x1 * x2 - 0.5 * y1 * y2);
    if (order == 3) {
        const double k = 0.75 * mw2 / params.L;
        v += k * ((x2 - x1) * y1 * y2 + 0.5 * (x1 * y2 * y2 - x2 * y1 * y1) + x1 * x2 * (x1 - x2));
    }
    return v;
}

std::array<double, 4> v_multipole_2d_gradient(const Vec2& r1, const Vec2& r2, int order,
                                              const PhysicalParams& params) {
    if (order != 2 && order != 3) throw InvalidArgument("multipole order must be 2 or 3");
    const double mw2 = params.m * omega_squared(params);
    const auto [x1, y1] = r1;
    const auto [x2, y2] = r2;
    std::array<double, 4> g{0.5 * mw2 * x2, -0.25 * mw2 * y2, 0.5 * mw2 * x1, -0.25 * mw2 * y1};
    if (order == 3) {
        const double k = 0.75 * mw2 / params.L;
        g[0] += k * (-y1 * y2 + 0.5 * y2 * y2 + 2.0 * x1 * x2 - x2 * x2);
        g[1] += k * ((x2 - x1) * y2 - x2 * y1);
        g[2] += k * (y1 * y2 - 0.5 * y1 * y1 + x1 * x1 - 2.0 * x1 * x2);
        g[3] += k * ((x2 - x1) * y1 + x1 * y2);
    }
    return g;
}

double v_exact_2d(const Vec2& r1, const Vec2& r2, const PhysicalParams& params) {
    const double dx = params.L + r2[0] - r1[0];
    const double dy = r2[1] - r1[1];
    const double d = std::hypot(dx, dy);
    if (!(dx > 0)) throw NumericalError("collision in the planar configuration");
    return -params.G * params.m * params.m / d;
}

} // namespace gravphase
