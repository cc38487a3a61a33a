#include "gravphase/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gravphase/errors.hpp"

namespace gravphase {

Eigen::Matrix4d frame_matrix() {
    Eigen::Matrix4d M;
    M << 1, 0, -0.5, 0,
         0, 0.5, 0, -1,
         1, 0, 0.5, 0,
         0, 0.5, 0, 1;
    return M;
}

Eigen::Matrix4d symplectic_form() {
    Eigen::Matrix4d O = Eigen::Matrix4d::Zero();
    O(0, 1) = O(2, 3) = 1;
    O(1, 0) = O(3, 2) = -1;
    return O;
}

CovarianceMatrix frame_transform(const CovarianceMatrix& cov) {
    static const Eigen::Matrix4d M = frame_matrix();
    static const Eigen::Matrix4d Minv = M.inverse();
    CovarianceMatrix out;
    out.t = cov.t;
    if (cov.frame == Frame::lab) {
        out.sigma = Minv * cov.sigma * Minv.transpose();
        out.frame = Frame::com;
    } else {
        out.sigma = M * cov.sigma * M.transpose();
        out.frame = Frame::lab;
    }
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    return out;
}

CovarianceMatrix initial_covariance(int n1, int n2, const PhysicalParams& params) {
    if (n1 < 0 || n2 < 0) throw InvalidArgument("Fock indices must be >= 0");
    params.validate();
    const double s2 = params.sigma * params.sigma;
    const double p2 = params.hbar * params.hbar / (4.0 * s2);
    CovarianceMatrix c;
    c.frame = Frame::lab;
    c.t = 0;
    c.sigma.diagonal() << (2 * n1 + 1) * s2, (2 * n1 + 1) * p2, (2 * n2 + 1) * s2, (2 * n2 + 1) * p2;
    return c;
}

Eigen::Matrix4d drift_matrix(const PhysicalParams& params) {
    const double m = params.m;
    const double w2 = 4.0 * params.G * m / std::pow(params.L, 3);
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    A(0, 1) = 1.0 / (2.0 * m);
    A(2, 3) = 2.0 / m;
    A(3, 2) = 0.5 * m * w2;
    return A;
}

Eigen::Matrix4d symplectic_propagator(double t, const PhysicalParams& params) {
    const double m = params.m;
    const double w = std::sqrt(4.0 * params.G * m / std::pow(params.L, 3));
    Eigen::Matrix4d S = Eigen::Matrix4d::Identity();
    S(0, 1) = t / (2.0 * m);
    S(2, 2) = S(3, 3) = std::cosh(w * t);
    S(2, 3) = 2.0 / (m * w) * std::sinh(w * t);
    S(3, 2) = 0.5 * m * w * std::sinh(w * t);
    return S;
}

CovarianceMatrix evolve_covariance(const CovarianceMatrix& cov0, double t, const PhysicalParams& params) {
    if (cov0.frame != Frame::com) throw InvalidArgument("evolve_covariance expects a COM-frame matrix");
    const Eigen::Matrix4d S = symplectic_propagator(t, params);
    CovarianceMatrix out;
    out.frame = Frame::com;
    out.t = cov0.t + t;
    out.sigma = S * cov0.sigma * S.transpose();
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    return out;
}

namespace {

void require_symmetric(const Eigen::Matrix4d& s) {
    const double scale = s.cwiseAbs().maxCoeff();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            // compare entries relative to the geometric scale of their row/column
            const double ref = std::sqrt(std::abs(s(i, i) * s(j, j))) + 1e-300 * scale;
            if (std::abs(s(i, j) - s(j, i)) > 1e-12 * ref) throw InvalidArgument("covariance matrix is not symmetric");
        }
}

long double det2(const Eigen::Matrix4d& s, int r, int c) {
    return static_cast<long double>(s(r, c)) * s(r + 1, c + 1) - static_cast<long double>(s(r, c + 1)) * s(r + 1, c);
}

long double det4(const Eigen::Matrix4d& s) {
    // Laplace expansion along the first two rows, in extended precision
    auto minor = [&](int r, int a, int b) {
        return static_cast<long double>(s(r, a)) * s(r + 1, b) - static_cast<long double>(s(r, b)) * s(r + 1, a);
    };
    return minor(0, 0, 1) * minor(2, 2, 3) - minor(0, 0, 2) * minor(2, 1, 3) + minor(0, 0, 3) * minor(2, 1, 2) +
           minor(0, 1, 2) * minor(2, 0, 3) - minor(0, 1, 3) * minor(2, 0, 2) + minor(0, 2, 3) * minor(2, 0, 1);
}

// `det` overrides the determinant when it is known exactly (symplectic invariance).
SymplecticPair eigenpair(const Eigen::Matrix4d& s, double sign, std::optional<long double> det = std::nullopt) {
    const long double da = det2(s, 0, 0);
    const long double db = det2(s, 2, 2);
    const long double dg = det2(s, 0, 2);
    const long double ds = det ? *det : det4(s);
    const long double delta = da + db + sign * 2.0L * dg;
    const long double disc = std::sqrt(std::max(0.0L, delta * delta - 4.0L * ds));
    SymplecticPair out;
    const long double plus2 = 0.5L * (delta + disc);
    out.plus = static_cast<double>(std::sqrt(plus2));
    // nu_- nu_+ = sqrt(det sigma); avoids cancellation in delta - disc
    out.minus = plus2 > 0 ? static_cast<double>(std::sqrt(std::max(0.0L, ds) / plus2)) : 0.0;
    return out;
}

} // namespace

SymplecticPair symplectic_eigenvalues(const CovarianceMatrix& cov) {
    require_symmetric(cov.sigma);
    return eigenpair(cov.sigma, +1.0);
}

SymplecticPair partial_transpose_eigenvalues(const CovarianceMatrix& cov) {
    require_symmetric(cov.sigma);
    return eigenpair(cov.sigma, -1.0);
}

double log_negativity(const CovarianceMatrix& cov, double hbar) {
    if (cov.frame != Frame::lab) throw InvalidArgument("log_negativity expects a lab-frame matrix");
    const SymplecticPair nu = partial_transpose_eigenvalues(cov);
    return std::max(0.0, -std::log2(2.0 * nu.minus / hbar));
}

bool satisfies_uncertainty(const CovarianceMatrix& cov, double hbar, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov.sigma, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 0) return false;
    return symplectic_eigenvalues(cov).minus >= 0.5 * hbar * (1.0 - tol);
}

double short_time_E0n(int n, double t, const PhysicalParams& params) {
    if (n < 1) throw InvalidArgument("short_time_E0n needs n >= 1");
    const double w2 = 4.0 * params.G * params.m / std::pow(params.L, 3);
    const double rate = params.hbar / (2.0 * params.m * params.sigma * params.sigma);
    const double nn = static_cast<double>(n);
    return (2.0 * nn + 1.0) / (8.0 * nn * (nn + 1.0) * std::log(2.0)) * w2 * w2 * t * t / (rate * rate);
}

double log_negativity_at(int n1, int n2, double t, const PhysicalParams& params) {
    const CovarianceMatrix lab0 = initial_covariance(n1, n2, params);
    const CovarianceMatrix lab = frame_transform(evolve_covariance(frame_transform(lab0), t, params));
    // M and S(t) are symplectic, so det sigma(t) = det sigma(0) exactly; the
    // direct 4x4 determinant loses all digits once omega t exceeds a few.
    long double det0 = 1;
    for (int i = 0; i < 4; ++i) det0 *= lab0.sigma(i, i);
    require_symmetric(lab.sigma);
    const SymplecticPair nu = eigenpair(lab.sigma, -1.0, det0);
    return std::max(0.0, -std::log2(2.0 * nu.minus / params.hbar));
}

} // namespace gravphase
