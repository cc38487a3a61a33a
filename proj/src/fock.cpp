#include "gravphase/fock.hpp"

#include <cmath>

#include "gravphase/errors.hpp"

namespace gravphase {

std::array<double, 4> quadratic_flow(double mu, double c2, double t) {
    // z' = A z with A = [[0, 1/mu], [-2 c2, 0]] and A^2 = lambda2 * I
    const double lambda2 = -2.0 * c2 / mu;
    double ch, sh_over; // cosh(l t) and sinh(l t)/l, or their trigonometric forms
    if (lambda2 > 0) {
        const double l = std::sqrt(lambda2);
        ch = std::cosh(l * t);
        sh_over = std::sinh(l * t) / l;
    } else if (lambda2 < 0) {
        const double l = std::sqrt(-lambda2);
        ch = std::cos(l * t);
        sh_over = std::sin(l * t) / l;
    } else {
        ch = 1.0;
        sh_over = t;
    }
    return {ch, sh_over / mu, -2.0 * c2 * sh_over, ch};
}

FockBasis FockBasis::ground_state(const PhysicalParams& params, std::size_t dim) {
    const DerivedScales s = derive_scales(params);
    FockBasis b;
    b.dim = dim;
    b.ell = std::sqrt(2.0) * s.sigma_r;
    b.mu = s.mu;
    b.hbar = params.hbar;
    b.validate();
    return b;
}

FockBasis FockBasis::interaction_frame(const PhysicalParams& params, const PotentialSpec& spec, double t,
                                       double center_r, double center_p, std::size_t dim) {
    FockBasis b = ground_state(params, dim);
    b.center_r = center_r;
    b.center_p = center_p;
    b.frame = quadratic_flow(b.mu, spec.quadratic_coefficient(), t);
    return b;
}

void FockBasis::validate() const {
    if (dim < 3) throw InvalidArgument("Fock basis needs dim >= 3");
    if (dim > 60) throw InvalidArgument("Fock basis dim > 60 is numerically unreliable");
    if (!(ell > 0) || !(hbar > 0)) throw InvalidArgument("Fock basis length and hbar must be positive");
    const double det = frame[0] * frame[3] - frame[1] * frame[2];
    if (std::abs(det - 1.0) > 1e-9) throw InvalidArgument("Fock frame must be symplectic (det = 1)");
}

namespace {

double laguerre(std::size_t n, double alpha, double x) {
    double lm1 = 1.0;
    if (n == 0) return lm1;
    double l = 1.0 + alpha - x;
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double next = ((2.0 * kk + 1.0 + alpha - x) * l - (kk + alpha) * lm1) / (kk + 1.0);
        lm1 = l;
        l = next;
    }
    return l;
}

} // namespace

std::complex<double> fock_wigner_kernel(std::size_t m, std::size_t n, double q, double k) {
    if (m < n) return std::conj(fock_wigner_kernel(n, m, q, k));
    const std::size_t a = m - n;
    const double rho2 = q * q + k * k;
    const double coef = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
    const std::complex<double> z(std::sqrt(2.0) * q, -std::sqrt(2.0) * k);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign / constants::pi * coef * std::pow(z, static_cast<int>(a)) * std::exp(-rho2) *
           laguerre(n, static_cast<double>(a), 2.0 * rho2);
}

double fock_wavefunction(std::size_t n, double r, double ell) {
    const double x = r / ell;
    double hm1 = 0.0;
    double h = std::pow(constants::pi, -0.25) * std::exp(-0.5 * x * x);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double next = std::sqrt(2.0 / (kk + 1.0)) * x * h - std::sqrt(kk / (kk + 1.0)) * hm1;
        hm1 = h;
        h = next;
    }
    return h / std::sqrt(ell);
}

WeylMatrix weyl_fock_matrix(const WignerField& f, const FockBasis& basis) {
    basis.validate();
    const std::size_t d = basis.dim;
    const auto& g = f.grid;

    // coefficient sqrt(n!/(n+a)!) * (-1)^n / pi
    std::vector<double> coef(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t n = 0; n + a < d; ++n)
            coef[a * d + n] = ((n % 2 == 0) ? 1.0 : -1.0) / constants::pi *
                              std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + a + 1.0)));

    // inverse frame: [[d, -b], [-c, a]]
    const auto [fa, fb, fc, fd] = basis.frame;
    const double wmax = f.max_abs();
    const double cutoff = 1e-15 * wmax;
    const double k_scale = basis.ell / basis.hbar;

    std::vector<std::complex<double>> rows(g.r.n * d * d, 0.0);
#pragma omp parallel
    {
        std::vector<std::complex<double>> zpow(d);
#pragma omp for schedule(dynamic, 4)
        for (std::size_t i = 0; i < g.r.n; ++i) {
            auto* acc = rows.data() + i * d * d;
            const double dr = g.r.at(i) - basis.center_r;
            for (std::size_t j = 0; j < g.p.n; ++j) {
                const double w = f.at(i, j);
                if (std::abs(w) <= cutoff) continue;
                const double dp = g.p.at(j) - basis.center_p;
                const double r0 = fd * dr - fb * dp;
                const double p0 = -fc * dr + fa * dp;
                const double q = r0 / basis.ell, k = p0 * k_scale;
                const double rho2 = q * q + k * k;
                const double e = std::exp(-rho2);
                if (e == 0.0) continue;
                const double X = 2.0 * rho2;
                const std::complex<double> z(std::sqrt(2.0) * q, -std::sqrt(2.0) * k);
                zpow[0] = w * e;
                for (std::size_t a = 1; a < d; ++a) zpow[a] = zpow[a - 1] * z;
                for (std::size_t a = 0; a < d; ++a) {
                    const double alpha = static_cast<double>(a);
                    double lm1 = 0.0, l = 1.0;
                    for (std::size_t n = 0; n + a < d; ++n) {
                        if (n == 1) {
                            lm1 = 1.0;
                            l = 1.0 + alpha - X;
                        } else if (n > 1) {
                            const double nn = static_cast<double>(n - 1);
                            const double next = ((2.0 * nn + 1.0 + alpha - X) * l - (nn + alpha) * lm1) / (nn + 1.0);
                            lm1 = l;
                            l = next;
                        }
                        acc[n * d + n + a] += (coef[a * d + n] * l) * zpow[a];
                    }
                }
            }
        }
    }

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < g.r.n; ++i)
        for (std::size_t n = 0; n < d; ++n)
            for (std::size_t m = n; m < d; ++m)
                sum(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) += rows[i * d * d + n * d + m];

    const double weight = 2.0 * constants::pi * g.r.step() * g.p.step();
    WeylMatrix out;
    out.rho.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index n = 0; n < static_cast<Eigen::Index>(d); ++n) {
        out.rho(n, n) = weight * sum(n, n).real();
        for (Eigen::Index m = n + 1; m < static_cast<Eigen::Index>(d); ++m) {
            out.rho(n, m) = weight * sum(n, m);
            out.rho(m, n) = std::conj(out.rho(n, m));
        }
    }
    out.t = f.t;
    out.basis = basis;
    out.origin = f.origin;
    out.leakage = 1.0 - out.rho.trace().real();
    return out;
}

double min_eigenvalue(const WeylMatrix& w, const std::optional<std::vector<std::size_t>>& subspace) {
    Eigen::MatrixXcd m;
    if (subspace) {
        const auto& idx = *subspace;
        if (idx.empty()) throw InvalidArgument("empty subspace");
        const auto k = static_cast<Eigen::Index>(idx.size());
        m.resize(k, k);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b) {
                if (idx[a] >= static_cast<std::size_t>(w.rho.rows()) || idx[b] >= static_cast<std::size_t>(w.rho.rows()))
                    throw InvalidArgument("subspace index out of range");
                m(a, b) = w.rho(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
            }
    } else {
        m = w.rho;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double lambda_12(const WeylMatrix& w) {
    const double a = w.rho(1, 1).real(), b = w.rho(2, 2).real();
    return 0.5 * (a + b) - std::sqrt(0.25 * (a - b) * (a - b) + std::norm(w.rho(1, 2)));
}

double short_time_lambda(const PhysicalParams& params, double t) {
    const double w2 = 4.0 * params.G * params.m / std::pow(params.L, 3);
    return -3.0 * params.m * w2 * std::pow(params.sigma, 3) * t / (4.0 * params.hbar * params.L);
}

double short_time_lambda_relative_width(const PhysicalParams& params, double t) {
    return short_time_lambda(params, t) * 2.0 * std::sqrt(2.0);
}

double nonquantumness_witness(const WeylMatrix& w) {
    if (w.rho.rows() < 3) throw InvalidArgument("witness needs dim >= 3");
    return 0.5 * (w.rho(1, 1).real() + w.rho(2, 2).real()) - w.rho(1, 2).imag();
}

} // namespace gravphase
