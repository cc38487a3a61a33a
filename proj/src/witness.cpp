#include "gravphase/witness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <limits>
#include <vector>

#include "gravphase/errors.hpp"

namespace gravphase {

void WitnessConfig::validate() const {
    if (!(delta > 0) || !(delta < 1.0 / std::sqrt(2.0)))
        throw InvalidArgument("window width must satisfy 0 < delta < 1/sqrt(2)");
    if (!std::isfinite(center_r) || !std::isfinite(center_p)) throw InvalidArgument("window centre must be finite");
}

WignerField to_dimensionless(const WignerField& field, const DerivedScales& s) {
    WignerField out = field;
    out.grid.r = Grid1D{field.grid.r.min / s.xunit, field.grid.r.max / s.xunit, field.grid.r.n};
    out.grid.p = Grid1D{field.grid.p.min / s.punit, field.grid.p.max / s.punit, field.grid.p.n};
    for (auto& v : out.values) v *= s.hbar;
    return out;
}

WignerField vacuum_field(const PhaseSpaceGrid& grid) {
    grid.validate();
    WignerField f;
    f.grid = grid;
    f.origin = FieldOrigin::quantum;
    f.values.resize(grid.r.n * grid.p.n);
    for (std::size_t i = 0; i < grid.r.n; ++i)
        for (std::size_t j = 0; j < grid.p.n; ++j) {
            const double r = grid.r.at(i), p = grid.p.at(j);
            f.at(i, j) = std::exp(-r * r - p * p) / constants::pi;
        }
    return f;
}

namespace {

void lagrange4(double t, double w[4]) {
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

// Cubic interpolation of samples data[k * stride] (k < n) at index position u.
double interp_line(const double* data, std::size_t n, std::size_t stride, double u) {
    const double fu = std::floor(u);
    const auto nn = static_cast<long long>(n);
    if (fu < -2 || fu > nn) return 0.0;
    double w[4];
    lagrange4(u - fu, w);
    const long long i0 = static_cast<long long>(fu) - 1;
    double s = 0;
    for (int a = 0; a < 4; ++a) {
        const long long i = i0 + a;
        if (i >= 0 && i < nn) s += w[a] * data[static_cast<std::size_t>(i) * stride];
    }
    return s;
}

} // namespace

double QuadratureMarginal::mass() const {
    if (density.size() < 2) return 0.0;
    double s = 0.5 * (density.front() + density.back());
    for (std::size_t i = 1; i + 1 < density.size(); ++i) s += density[i];
    return s * dx;
}

double QuadratureMarginal::operator()(double x) const {
    return interp_line(density.data(), density.size(), 1, (x - x_min) / dx);
}

QuadratureMarginal radon_marginal(const WignerField& field, double phi, std::size_t n_x) {
    if (n_x < 16) throw InvalidArgument("marginal needs at least 16 points");
    const auto& g = field.grid;
    const double c = std::cos(phi), s = std::sin(phi);
    const double hr = g.r.step(), hp = g.p.step();

    // x extent of the points above 1e-13 of the peak, padded by the reach of
    // the cubic interpolant. Skewed tails make moment-based windows too narrow.
    const double floor = 1e-13 * field.max_abs();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < g.r.n; ++i) {
        const double xr = g.r.at(i) * c;
        for (std::size_t j = 0; j < g.p.n; ++j) {
            if (std::abs(field.at(i, j)) <= floor) continue;
            const double x = xr + g.p.at(j) * s;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    const double pad = 3 * (hr * std::abs(c) + hp * std::abs(s));
    lo -= pad;
    hi += pad;
    if (!(hi > lo)) throw NumericalError("marginal support is empty");

    QuadratureMarginal m;
    m.phi = phi;
    m.x_min = lo;
    m.dx = (hi - lo) / static_cast<double>(n_x - 1);
    m.density.assign(n_x, 0.0);

    // Sum along rows when the line crosses at most one p-cell per row, else along columns.
    const bool by_rows = hr * std::abs(c) <= hp * std::abs(s);
#pragma omp parallel for schedule(static)
    for (std::size_t l = 0; l < n_x; ++l) {
        const double x = m.x_at(l);
        double sum = 0;
        if (by_rows) {
            for (std::size_t i = 0; i < g.r.n; ++i) {
                const double p = (x - g.r.at(i) * c) / s;
                sum += interp_line(field.values.data() + i * g.p.n, g.p.n, 1, (p - g.p.min) / hp);
            }
            m.density[l] = sum * hr / std::abs(s);
        } else {
            for (std::size_t j = 0; j < g.p.n; ++j) {
                const double r = (x - g.p.at(j) * s) / c;
                sum += interp_line(field.values.data() + j, g.r.n, g.p.n, (r - g.r.min) / hr);
            }
            m.density[l] = sum * hp / std::abs(c);
        }
    }
    const double total = field.integral();
    if (std::abs(m.mass() - total) > 1e-6 * std::abs(total)) {
        std::ostringstream msg;
        msg << "quadrature marginal at phi=" << phi << " loses mass (" << m.mass() << " vs " << total
            << "): support leaves the grid";
        throw NumericalError(msg.str());
    }
    return m;
}

namespace {

struct AxisWeights {
    long long first = 0;
    std::vector<double> w;
};

// Weights w_i = ∫ g(x) L_i(x) dx of a normalized Gaussian g (centre c, width D)
// against the cardinal functions of the field's cubic interpolant. Cubic
// cardinals have negative lobes, so when D is not resolved by the grid some
// w_i turn negative. The result is then blended with the hat-function weights
// of linear interpolation (all >= 0) using the smallest mixing fraction that
// leaves every weight nonnegative: the rule stays exact for linear fields and
// a nonnegative field always gives a nonnegative witness.
AxisWeights window_weights(const Grid1D& g, double c, double D) {
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    const double h = g.step();
    const long long n = static_cast<long long>(g.n);
    const long long k0 = std::max(0LL, static_cast<long long>(std::floor((c - 9 * D - g.min) / h)));
    const long long k1 = std::min(n - 2, static_cast<long long>(std::floor((c + 9 * D - g.min) / h)));
    const int pieces = static_cast<int>(std::max(1.0, std::ceil(h / (0.5 * D))));
    const double norm = 1.0 / (std::sqrt(2.0 * constants::pi) * D);

    AxisWeights out;
    out.first = k0 - 1;
    const auto size = static_cast<std::size_t>(k1 - k0 + 4);
    out.w.assign(size, 0.0);
    std::vector<double> hat(size, 0.0);
    for (long long k = k0; k <= k1; ++k)
        for (int q = 0; q < pieces; ++q)
            for (int a = 0; a < 8; ++a) {
                const double t = (q + 0.5 + 0.5 * gx[a]) / pieces;
                const double u = (g.at(static_cast<std::size_t>(k)) + t * h - c) / D;
                const double gval = norm * std::exp(-0.5 * u * u) * 0.5 * gw[a] * h / pieces;
                const auto base = static_cast<std::size_t>(k - out.first);
                out.w[base - 1] += gval * (-t * (t - 1) * (t - 2) / 6);
                out.w[base] += gval * ((t + 1) * (t - 1) * (t - 2) / 2);
                out.w[base + 1] += gval * (-(t + 1) * t * (t - 2) / 2);
                out.w[base + 2] += gval * ((t + 1) * t * (t - 1) / 6);
                hat[base] += gval * (1 - t);
                hat[base + 1] += gval * t;
            }
    // Stencils cut by the 9 D limit or by the grid edge leave negative weights
    // far out in the Gaussian tail; dropping those below 1e-10 of the peak
    // costs at most that fraction of the window and keeps the blend local.
    const double floor = 1e-10 * *std::max_element(out.w.begin(), out.w.end());
    double lambda = 0;
    for (std::size_t i = 0; i < size; ++i) {
        if (out.w[i] < 0 && -out.w[i] < floor) out.w[i] = 0;
        if (out.w[i] < 0) lambda = std::max(lambda, out.w[i] / (out.w[i] - hat[i]));
    }
    for (std::size_t i = 0; i < size; ++i) out.w[i] = std::max(0.0, (1 - lambda) * out.w[i] + lambda * hat[i]);
    return out;
}

} // namespace

double direct_witness(const WignerField& field, const WitnessConfig& cfg) {
    cfg.validate();
    const auto& g = field.grid;
    const double D = cfg.delta;
    if (cfg.center_r - 6 * D < g.r.min || cfg.center_r + 6 * D > g.r.max || cfg.center_p - 6 * D < g.p.min ||
        cfg.center_p + 6 * D > g.p.max)
        throw InvalidArgument("field grid does not cover the window support");
    // the window is a product of two Gaussians, so the rule is a tensor product
    const AxisWeights wr = window_weights(g.r, cfg.center_r, D);
    const AxisWeights wp = window_weights(g.p, cfg.center_p, D);
    const auto nr = static_cast<long long>(g.r.n), np = static_cast<long long>(g.p.n);
    double sum = 0;
    for (std::size_t a = 0; a < wr.w.size(); ++a) {
        const long long i = wr.first + static_cast<long long>(a);
        if (i < 0 || i >= nr || wr.w[a] == 0) continue;
        double row = 0;
        for (std::size_t b = 0; b < wp.w.size(); ++b) {
            const long long j = wp.first + static_cast<long long>(b);
            if (j < 0 || j >= np) continue;
            row += wp.w[b] * field.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
        sum += wr.w[a] * row;
    }
    return sum;
}

namespace {

// ∫ p(x) Gamma_D(x - x0) dx over the marginal grid with cubic p and
// Gauss-Legendre pieces refined near x0.
double integrate_pattern(const QuadratureMarginal& m, double x0, double D) {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
    double total = 0;
    const std::size_t n = m.density.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t lo = i > 0 ? i - 1 : 0, hi = std::min(n - 1, i + 2);
        bool empty = true;
        for (std::size_t k = lo; k <= hi; ++k) empty = empty && m.density[k] == 0.0;
        if (empty) continue;
        const double a = m.x_at(i), b = m.x_at(i + 1);
        const double dist = x0 < a ? a - x0 : (x0 > b ? x0 - b : 0.0);
        const double scale = std::max(D, dist) / 4.0;
        const auto pieces = static_cast<int>(std::min(256.0, std::ceil((b - a) / scale)));
        const double w = (b - a) / pieces;
        for (int q = 0; q < pieces; ++q) {
            const double mid = a + (q + 0.5) * w;
            for (int k = 0; k < 4; ++k) {
                const double x = mid + 0.5 * w * gx[k];
                total += 0.5 * w * gw[k] * m(x) * pattern_function(x - x0, D);
            }
        }
    }
    return total;
}

} // namespace

double tomographic_witness(const WignerField& field, const WitnessConfig& cfg, std::size_t n_angles,
                           std::size_t n_x) {
    cfg.validate();
    if (n_angles < 4) throw InvalidArgument("need at least 4 angles");
    double sum = 0;
    for (std::size_t k = 0; k < n_angles; ++k) {
        const double phi = (static_cast<double>(k) + 0.5) * constants::pi / static_cast<double>(n_angles);
        const QuadratureMarginal m = radon_marginal(field, phi, n_x);
        const double x0 = cfg.center_r * std::cos(phi) + cfg.center_p * std::sin(phi);
        sum += integrate_pattern(m, x0, cfg.delta);
    }
    return sum / static_cast<double>(n_angles) / constants::pi;
}

double c_gamma(const MarginalSet& marginals, const WitnessConfig& cfg) {
    cfg.validate();
    const std::size_t K = marginals.angles();
    double s = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& m = marginals.marginal(k);
        s += m(cfg.center_r * std::cos(m.phi) + cfg.center_p * std::sin(m.phi));
    }
    return s / static_cast<double>(K) * pattern_profile_l2();
}

namespace {

struct PerturbativeScales {
    double eps, sr, sp;
};

PerturbativeScales perturbative_scales(const PhysicalParams& params, double t) {
    const DerivedScales s = derive_scales(params, t);
    return {s.epsilon, s.sigma_r / s.xunit, s.sigma_p / s.punit};
}

double windowed_value(const PerturbativeScales& ps, double delta, double p0) {
    const double sr = std::sqrt(ps.sr * ps.sr + delta * delta);
    const double sp = std::sqrt(ps.sp * ps.sp + delta * delta);
    const double eps = ps.eps * std::pow(ps.sp / sp, 3);
    const double u = p0 / sp;
    return (1.0 + eps * (u * u * u - 3.0 * u)) * std::exp(-0.5 * u * u) / (2.0 * constants::pi * sr * sp);
}

// Minimizes f on [a, b] by golden-section search after a coarse scan.
template <class F>
double minimize(F f, double a, double b) {
    const int n = 2000;
    double best = a, fbest = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x = a + (b - a) * i / n;
        const double v = f(x);
        if (v < fbest) {
            fbest = v;
            best = x;
        }
    }
    double lo = std::max(a, best - (b - a) / n), hi = std::min(b, best + (b - a) / n);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(best)); ++it) {
        const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        if (f(x1) < f(x2)) hi = x2;
        else lo = x1;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double perturbative_windowed(const PhysicalParams& params, double t, double delta, double p0) {
    return windowed_value(perturbative_scales(params, t), delta, p0);
}

PerturbativeEstimate perturbative_wigner(const PhysicalParams& params, double t) {
    const PerturbativeScales ps = perturbative_scales(params, t);
    if (!(ps.eps < 0.2)) throw InvalidArgument("perturbation strength epsilon >= 0.2: first order is not reliable");
    PerturbativeEstimate out;
    out.epsilon = ps.eps;
    out.sigma_r = ps.sr;
    out.sigma_p = ps.sp;

    const double umin = minimize([&](double u) { return (1.0 + ps.eps * (u * u * u - 3.0 * u)) * std::exp(-0.5 * u * u); },
                                 -6.0, 0.0);
    out.p0 = umin * ps.sp;
    out.tail_min = windowed_value(ps, 0.0, out.p0);

    // Critical window: the windowed value at the tail centre changes sign.
    auto at_center = [&](double d) { return windowed_value(ps, d, out.p0); };
    if (out.tail_min < 0) {
        const double dmax = 1.0 / std::sqrt(2.0);
        double lo = 0.0, hi = -1.0;
        const int scan = 1000;
        for (int i = 1; i <= scan; ++i) {
            const double d = dmax * i / (scan + 1);
            if (at_center(d) >= 0) {
                hi = d;
                break;
            }
            lo = d;
        }
        if (hi > 0) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (at_center(mid) < 0 ? lo : hi) = mid;
            }
            out.delta_star = 0.5 * (lo + hi);
        }
    }
    if (out.delta_star) {
        const double d = *out.delta_star;
        const double sp = std::sqrt(ps.sp * ps.sp + d * d);
        out.n_opt_p0 = minimize([&](double p) { return windowed_value(ps, d, p); }, -6.0 * sp, 0.0);
        out.n_opt = windowed_value(ps, d, out.n_opt_p0);
    }
    return out;
}

double sample_complexity(const WitnessConfig& cfg, double witness_value, double c_gamma_value) {
    cfg.validate();
    if (!(witness_value < 0)) throw InvalidArgument("sample complexity needs a negative witness value");
    if (!(c_gamma_value > 0)) throw InvalidArgument("C_Gamma must be positive");
    return c_gamma_value / std::pow(cfg.delta, 3) / (witness_value * witness_value);
}

std::string samples_to_csv(const std::vector<QuadratureSample>& samples) {
    std::string out = "phi,x\n";
    char buf[64];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.phi, s.x);
        out += buf;
    }
    return out;
}

} // namespace gravphase
