#include "gravphase/phase_space.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "gravphase/errors.hpp"

namespace gravphase {

double WignerField::integral() const {
    double s = 0;
    for (double v : values) s += v;
    return s * grid.r.step() * grid.p.step();
}

double WignerField::max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> WignerField::position_marginal() const {
    std::vector<double> out(grid.r.n, 0.0);
    const double hp = grid.p.step();
    for (std::size_t i = 0; i < grid.r.n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < grid.p.n; ++j) s += at(i, j);
        out[i] = s * hp;
    }
    return out;
}

std::vector<double> WignerField::momentum_marginal() const {
    std::vector<double> out(grid.p.n, 0.0);
    const double hr = grid.r.step();
    for (std::size_t i = 0; i < grid.r.n; ++i)
        for (std::size_t j = 0; j < grid.p.n; ++j) out[j] += at(i, j);
    for (auto& v : out) v *= hr;
    return out;
}

double WignerField::purity(double hbar) const {
    double s = 0;
    for (double v : values) s += v * v;
    return 2.0 * constants::pi * hbar * s * grid.r.step() * grid.p.step();
}

namespace {

// Weights of the 4-point Lagrange stencil at fractional offset t in [0,1),
// nodes at -1, 0, 1, 2.
void lagrange4(double t, double w[4]) {
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

} // namespace

double WignerField::interpolate(double r, double p) const {
    const double u = (r - grid.r.min) / grid.r.step();
    const double v = (p - grid.p.min) / grid.p.step();
    const double fu = std::floor(u), fv = std::floor(v);
    const auto nr = static_cast<long long>(grid.r.n), np = static_cast<long long>(grid.p.n);
    if (fu < -2 || fv < -2 || fu > nr || fv > np) return 0.0;
    double wu[4], wv[4];
    lagrange4(u - fu, wu);
    lagrange4(v - fv, wv);
    const auto i0 = static_cast<long long>(fu) - 1, j0 = static_cast<long long>(fv) - 1;
    double s = 0;
    for (int a = 0; a < 4; ++a) {
        const long long i = i0 + a;
        if (i < 0 || i >= nr) continue;
        double row = 0;
        for (int b = 0; b < 4; ++b) {
            const long long j = j0 + b;
            if (j < 0 || j >= np) continue;
            row += wv[b] * values[static_cast<std::size_t>(i * np + j)];
        }
        s += wu[a] * row;
    }
    return s;
}

MomentSet moments(const WignerField& f) {
    const auto& g = f.grid;
    const double norm = f.integral();
    if (!(std::abs(norm) > 0)) throw InvalidArgument("field has zero integral");
    const double dA = g.r.step() * g.p.step() / norm;
    MomentSet m;
    m.t = f.t;
    for (std::size_t i = 0; i < g.r.n; ++i)
        for (std::size_t j = 0; j < g.p.n; ++j) {
            const double w = f.at(i, j) * dA;
            m.mean_r += w * g.r.at(i);
            m.mean_p += w * g.p.at(j);
        }
    for (std::size_t i = 0; i < g.r.n; ++i) {
        const double dr = g.r.at(i) - m.mean_r;
        for (std::size_t j = 0; j < g.p.n; ++j) {
            const double dp = g.p.at(j) - m.mean_p;
            const double w = f.at(i, j) * dA;
            m.var_r += w * dr * dr;
            m.var_p += w * dp * dp;
            m.cov_rp += w * dr * dp;
            m.mu3_p += w * dp * dp * dp;
        }
    }
    m.skew_p = m.var_p > 0 ? m.mu3_p / std::pow(m.var_p, 1.5) : 0.0;
    return m;
}

WignerMinimum wigner_min(const WignerField& f) {
    const auto& g = f.grid;
    std::size_t best = 0;
    for (std::size_t k = 1; k < f.values.size(); ++k)
        if (f.values[k] < f.values[best]) best = k;
    const std::size_t i = best / g.p.n, j = best % g.p.n;
    WignerMinimum out;
    out.raw_value = out.value = f.values[best];
    out.raw_r = out.r = g.r.at(i);
    out.raw_p = out.p = g.p.at(j);
    if (i == 0 || j == 0 || i + 1 >= g.r.n || j + 1 >= g.p.n) return out;

    Eigen::Matrix<double, 9, 6> A;
    Eigen::Matrix<double, 9, 1> y;
    int row = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b, ++row) {
            A.row(row) << 1.0, a, b, a * a, a * b, b * b;
            y(row) = f.at(i + a, j + b);
        }
    const Eigen::Matrix<double, 6, 1> c = A.colPivHouseholderQr().solve(y);
    Eigen::Matrix2d H;
    H << 2 * c(3), c(4), c(4), 2 * c(5);
    if (H.determinant() <= 0 || H(0, 0) <= 0) return out;
    const Eigen::Vector2d x = H.ldlt().solve(-Eigen::Vector2d(c(1), c(2)));
    if (std::abs(x(0)) > 1.0 || std::abs(x(1)) > 1.0) return out;
    out.value = c(0) + c(1) * x(0) + c(2) * x(1) + c(3) * x(0) * x(0) + c(4) * x(0) * x(1) +
                c(5) * x(1) * x(1);
    out.r = out.raw_r + x(0) * g.r.step();
    out.p = out.raw_p + x(1) * g.p.step();
    return out;
}

PhaseSpaceGrid auto_phase_grid(const MomentSet& m, std::size_t n_r, std::size_t n_p, double n_sigma) {
    if (!(m.var_r > 0) || !(m.var_p > 0)) throw InvalidArgument("moments need positive variances");
    const double hr = n_sigma * std::sqrt(m.var_r), hp = n_sigma * std::sqrt(m.var_p);
    PhaseSpaceGrid g{Grid1D{m.mean_r - hr, m.mean_r + hr, n_r}, Grid1D{m.mean_p - hp, m.mean_p + hp, n_p}};
    g.validate();
    return g;
}

} // namespace gravphase
