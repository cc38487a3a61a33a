#pragma once

#include <utility>

#include <Eigen/Dense>

#include "gravphase/core.hpp"

namespace gravphase {

enum class Frame { lab, com };

// Second moments of the two-mode state, ordered (x1, p1, x2, p2) in the lab
// frame and (R, P, r, p) in the centre-of-mass frame.
struct CovarianceMatrix {
    Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
    Frame frame = Frame::lab;
    double t = 0;
};

// X = M R with X = (x1, p1, x2, p2), R = (R, P, r, p).
Eigen::Matrix4d frame_matrix();
Eigen::Matrix4d symplectic_form();

CovarianceMatrix frame_transform(const CovarianceMatrix& cov);
CovarianceMatrix initial_covariance(int n1, int n2, const PhysicalParams& params);

// Drift matrix of the quadratic Hamiltonian in the (R, P, r, p) ordering.
// Constant and linear potential terms do not enter second moments and are dropped.
Eigen::Matrix4d drift_matrix(const PhysicalParams& params);
Eigen::Matrix4d symplectic_propagator(double t, const PhysicalParams& params);
CovarianceMatrix evolve_covariance(const CovarianceMatrix& cov0, double t, const PhysicalParams& params);

struct SymplecticPair {
    double minus = 0;
    double plus = 0;
};

// Symplectic eigenvalues of sigma (or of its partial transpose) from the
// two-mode invariants.
SymplecticPair symplectic_eigenvalues(const CovarianceMatrix& cov);
SymplecticPair partial_transpose_eigenvalues(const CovarianceMatrix& cov);

// E = max(0, -log2(2 nu_minus / hbar)) for a lab-frame matrix.
double log_negativity(const CovarianceMatrix& cov, double hbar);

// Whether sigma + i hbar Omega / 2 >= 0 (up to tol times the scale of sigma).
bool satisfies_uncertainty(const CovarianceMatrix& cov, double hbar, double tol = 1e-10);

// Leading small-t logarithmic negativity for Fock inputs (0, n), n >= 1.
double short_time_E0n(int n, double t, const PhysicalParams& params);

// E^{(n1,n2)}(t) through initial_covariance -> COM -> evolve -> lab -> log_negativity.
double log_negativity_at(int n1, int n2, double t, const PhysicalParams& params);

} // namespace gravphase
