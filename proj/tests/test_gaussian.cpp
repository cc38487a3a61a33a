#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "gravphase/errors.hpp"
#include "gravphase/gaussian.hpp"

using namespace gravphase;
using doctest::Approx;

namespace {

// Symplectic eigenvalues as moduli of the spectrum of i Omega sigma.
std::pair<double, double> williamson(const Eigen::Matrix4d& s) {
    const Eigen::Matrix4d K = symplectic_form() * s;
    Eigen::EigenSolver<Eigen::Matrix4d> es(K);
    std::vector<double> v;
    for (int i = 0; i < 4; ++i) v.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(v.begin(), v.end());
    return {0.5 * (v[0] + v[1]), 0.5 * (v[2] + v[3])};
}

// Random valid covariance: S diag(a, a, b, b) S^T with S a product of
// symplectic shears and squeezes.
Eigen::Matrix4d random_covariance(std::mt19937_64& eng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    const double a = 1.0 + std::abs(U(eng)), b = 1.0 + 2 * std::abs(U(eng));
    s.diagonal() << a, a, b, b;
    for (int k = 0; k < 4; ++k) {
        Eigen::Matrix4d S = Eigen::Matrix4d::Identity();
        // mode mixing by a beam splitter, then local squeeze and shear
        const double th = U(eng) * constants::pi;
        S(0, 0) = S(1, 1) = S(2, 2) = S(3, 3) = std::cos(th);
        S(0, 2) = S(1, 3) = std::sin(th);
        S(2, 0) = S(3, 1) = -std::sin(th);
        Eigen::Matrix4d Q = Eigen::Matrix4d::Identity();
        const double r = 0.5 * U(eng);
        Q(0, 0) = std::exp(r);
        Q(1, 1) = std::exp(-r);
        Q(2, 3) = U(eng);
        s = Q * S * s * S.transpose() * Q.transpose();
    }
    return 0.5 * (s + s.transpose());
}

const PhysicalParams P;

double omega() { return std::sqrt(4 * P.G * P.m / std::pow(P.L, 3)); }

} // namespace

TEST_CASE("frame matrix and round trip") {
    Eigen::Matrix4d M;
    M << 1, 0, -0.5, 0, 0, 0.5, 0, -1, 1, 0, 0.5, 0, 0, 0.5, 0, 1;
    CHECK((frame_matrix() - M).cwiseAbs().maxCoeff() == 0.0);
    // M preserves the symplectic form, so it maps canonical pairs to canonical pairs
    CHECK((M * symplectic_form() * M.transpose() - symplectic_form()).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937_64 eng(3);
    for (int k = 0; k < 20; ++k) {
        CovarianceMatrix c{random_covariance(eng), Frame::lab, 0};
        const auto back = frame_transform(frame_transform(c));
        CHECK(back.frame == Frame::lab);
        CHECK((back.sigma - c.sigma).cwiseAbs().maxCoeff() < 1e-12 * c.sigma.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("initial covariances") {
    const double s2 = P.sigma * P.sigma, p2 = P.hbar * P.hbar / (4 * s2);
    const auto c00 = initial_covariance(0, 0, P);
    CHECK(c00.frame == Frame::lab);
    CHECK(c00.sigma(0, 0) == Approx(s2).epsilon(1e-15));
    CHECK(c00.sigma(1, 1) == Approx(p2).epsilon(1e-15));
    CHECK(c00.sigma(2, 2) == Approx(s2).epsilon(1e-15));
    CHECK(c00.sigma(3, 3) == Approx(p2).epsilon(1e-15));
    for (int n : {1, 2, 3})
        CHECK((initial_covariance(n, n, P).sigma - (2 * n + 1) * c00.sigma).cwiseAbs().maxCoeff() == 0.0);

    // product ground states separate into COM and relative blocks
    const auto com = frame_transform(c00);
    CHECK(com.sigma.block<2, 2>(0, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(com.sigma(2, 2) == Approx(2 * s2).epsilon(1e-14));
    CHECK(com.sigma(3, 3) == Approx(p2 / 2).epsilon(1e-14));
    // asymmetric Fock inputs couple the two blocks
    const auto com01 = frame_transform(initial_covariance(0, 1, P));
    CHECK(com01.sigma.block<2, 2>(0, 2).cwiseAbs().maxCoeff() > 0.1 * s2);

    CHECK(satisfies_uncertainty(c00, P.hbar));
    CHECK(log_negativity(c00, P.hbar) == 0.0);
    CHECK_THROWS_AS(initial_covariance(-1, 0, P), InvalidArgument);
}

TEST_CASE("symplectic propagator") {
    const double w = omega();
    CHECK((symplectic_propagator(0.0, P) - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::Matrix4d A = drift_matrix(P);
    CHECK(A(0, 1) == Approx(1 / (2 * P.m)));
    CHECK(A(2, 3) == Approx(2 / P.m));
    CHECK(A(3, 2) == Approx(P.m * w * w / 2));
    CHECK(A.cwiseAbs().sum() == Approx(A(0, 1) + A(2, 3) + A(3, 2)));

    // S is symplectic in the scaled coordinates where entries are O(1)
    Eigen::Matrix4d D = Eigen::Matrix4d::Identity();
    D(0, 0) = D(2, 2) = 1 / P.sigma;
    D(1, 1) = D(3, 3) = P.sigma / P.hbar;
    const Eigen::Matrix4d Dinv = D.inverse();
    for (double t : {1.0, 100.0, 1000.0}) {
        const Eigen::Matrix4d S = symplectic_propagator(t, P);
        CHECK((S * symplectic_form() * S.transpose() - symplectic_form()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(S.determinant() == Approx(1.0).epsilon(1e-12));

        // central differences against A S, error shrinking as h^2
        auto fd_error = [&](double h) {
            const Eigen::Matrix4d d = (symplectic_propagator(t + h, P) - symplectic_propagator(t - h, P)) / (2 * h);
            return (D * (d - A * S) * Dinv).cwiseAbs().maxCoeff() / (D * A * S * Dinv).cwiseAbs().maxCoeff();
        };
        const double e1 = fd_error(0.05 / w), e2 = fd_error(0.025 / w);
        CHECK(e1 < 1e-3);
        CHECK(e1 / e2 == Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("evolved covariance keeps its symplectic spectrum") {
    const auto com0 = frame_transform(initial_covariance(0, 0, P));
    const auto nu0 = williamson(com0.sigma);
    CHECK(nu0.first == Approx(P.hbar / 2).epsilon(1e-10));
    const double w = omega();
    double prev = com0.sigma(2, 2);
    for (double wt : {0.1, 0.5, 1.0, 2.0}) {
        const auto c = evolve_covariance(com0, wt / w, P);
        const auto nu = symplectic_eigenvalues(c);
        CHECK(nu.minus == Approx(P.hbar / 2).epsilon(1e-10));
        CHECK(nu.plus == Approx(P.hbar / 2).epsilon(1e-10));
        CHECK(c.sigma(2, 2) > prev);
        prev = c.sigma(2, 2);
        CHECK((c.sigma - c.sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    // leading growth of Var(r) is quadratic in t
    const double t1 = 1e-3 / w;
    const double d1 = evolve_covariance(com0, t1, P).sigma(2, 2) - com0.sigma(2, 2);
    const double d2 = evolve_covariance(com0, 2 * t1, P).sigma(2, 2) - com0.sigma(2, 2);
    CHECK(d2 / d1 == Approx(4.0).epsilon(1e-3));
    CHECK_THROWS_AS(evolve_covariance(initial_covariance(0, 0, P), 1.0, P), InvalidArgument);
}

TEST_CASE("partial transpose matches an explicit momentum flip") {
    std::mt19937_64 eng(11);
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    T(3, 3) = -1;
    for (int k = 0; k < 100; ++k) {
        const Eigen::Matrix4d s = random_covariance(eng);
        const CovarianceMatrix c{s, Frame::lab, 0};
        const auto pt = partial_transpose_eigenvalues(c);
        const auto ref = williamson(T * s * T);
        CHECK(pt.minus == Approx(ref.first).epsilon(1e-8));
        CHECK(pt.plus == Approx(ref.second).epsilon(1e-8));
        const auto nu = symplectic_eigenvalues(c);
        const auto ref2 = williamson(s);
        CHECK(nu.minus == Approx(ref2.first).epsilon(1e-8));
        CHECK(nu.plus == Approx(ref2.second).epsilon(1e-8));
        CHECK(pt.plus * pt.minus == Approx(std::sqrt(s.determinant())).epsilon(1e-10));
        CHECK(nu.plus * nu.minus == Approx(std::sqrt(s.determinant())).epsilon(1e-10));
    }
    Eigen::Matrix4d bad = random_covariance(eng);
    bad(0, 1) += 1e-3;
    CHECK_THROWS_AS(symplectic_eigenvalues({bad, Frame::lab, 0}), InvalidArgument);
    CHECK_THROWS_AS(log_negativity(frame_transform(initial_covariance(0, 0, P)), P.hbar), InvalidArgument);
}

TEST_CASE("uncertainty flag") {
    CovarianceMatrix c = initial_covariance(0, 0, P);
    CHECK(satisfies_uncertainty(c, P.hbar));
    c.sigma(1, 1) *= 0.5;
    CHECK_FALSE(satisfies_uncertainty(c, P.hbar));
}

TEST_CASE("Fock-state scaling of the logarithmic negativity") {
    const double w = omega();
    std::vector<double> ts;
    for (int i = 0; i < 50; ++i) ts.push_back((0.05 + 0.1 * i) / w);
    double prev = 0;
    bool any_positive = false;
    for (double t : ts) {
        const double e00 = log_negativity_at(0, 0, t, P);
        CHECK(e00 >= prev);
        prev = e00;
        any_positive = any_positive || e00 > std::log2(7.0);
        for (int n : {1, 2, 3})
            CHECK(log_negativity_at(n, n, t, P) ==
                  Approx(std::max(0.0, e00 - std::log2(2.0 * n + 1))).epsilon(1e-9).scale(1.0));
    }
    CHECK(any_positive);
    // degenerate symplectic spectrum at t = 0: the quartic root carries sqrt(eps) noise
    CHECK(log_negativity_at(0, 0, 0.0, P) < 1e-9);
}

TEST_CASE("short-time entanglement of (0, n) inputs") {
    const double w = omega();
    CHECK(short_time_E0n(1, 0.0, P) == 0.0);
    CHECK_THROWS_AS(short_time_E0n(0, 1.0, P), InvalidArgument);
    for (int n : {1, 2, 3, 5}) {
        const double t = 1e-3 / w;
        const double full = log_negativity_at(0, n, t, P);
        CHECK(full > 0);
        CHECK(short_time_E0n(n, t, P) / full == Approx(1.0).epsilon(0.05));
        CHECK(short_time_E0n(n, 2 * t, P) == Approx(4 * short_time_E0n(n, t, P)).epsilon(1e-12));
    }
    // large-n prefactor approaches 1/(4n)
    const double t = 1e-3 / w;
    const double unit = short_time_E0n(1, t, P) * (8 * 2 * std::log(2.0)) / 3.0;
    for (int n : {100, 1000, 10000})
        CHECK(short_time_E0n(n, t, P) * std::log(2.0) * 4 * n / unit == Approx(1.0).epsilon(1.0 / n));
}
