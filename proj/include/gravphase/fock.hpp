#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gravphase/phase_space.hpp"
#include "gravphase/potential.hpp"

namespace gravphase {

// Harmonic-oscillator basis chi_n(r) = ell^{-1/2} h_n(r/ell) whose ground state
// is the initial relative Gaussian (ell^2 = 2 sigma_r^2). The basis may be
// displaced to (center_r, center_p) and carried by a linear symplectic map
// `frame` = [[a, b], [c, d]] acting on (r, p): its states are U|n> with
// Wigner kernels W_n(frame^{-1}(z - center)).
struct FockBasis {
    std::size_t dim = 24;
    double ell = 0;
    double mu = 0;
    double hbar = 0;
    double center_r = 0;
    double center_p = 0;
    std::array<double, 4> frame{1, 0, 0, 1};

    static FockBasis ground_state(const PhysicalParams& params, std::size_t dim = 24);
    // Basis following the Gaussian part of the motion: centred on the field's
    // mean and transported by the flow of the quadratic part of `spec` over t.
    // At t = 0 it coincides with ground_state.
    static FockBasis interaction_frame(const PhysicalParams& params, const PotentialSpec& spec, double t,
                                       double center_r, double center_p, std::size_t dim = 24);

    void validate() const;
};

// Linear flow map over t of H = p^2/2mu + c2 r^2, as [[a, b], [c, d]].
std::array<double, 4> quadratic_flow(double mu, double c2, double t);

// Dimensionless Wigner function of |m><n| for the unit oscillator at (q, k).
std::complex<double> fock_wigner_kernel(std::size_t m, std::size_t n, double q, double k);

// chi_n(r) in the unframed, undisplaced basis.
double fock_wavefunction(std::size_t n, double r, double ell);

struct WeylMatrix {
    Eigen::MatrixXcd rho;
    double t = 0;
    FockBasis basis;
    double leakage = 0;
    FieldOrigin origin = FieldOrigin::classical;

    bool leakage_warning() const { return leakage > 1e-3; }
};

// rho_jk = 2 pi hbar * integral of f W_{|k><j|}, from analytic Laguerre kernels.
WeylMatrix weyl_fock_matrix(const WignerField& f, const FockBasis& basis);

// Smallest eigenvalue of the matrix or of the principal submatrix on `subspace`.
double min_eigenvalue(const WeylMatrix& w, const std::optional<std::vector<std::size_t>>& subspace = std::nullopt);

// Smallest eigenvalue of the {|1>, |2>} block.
double lambda_12(const WeylMatrix& w);

// Short-time negative eigenvalue -3 m omega^2 sigma^3 t / (4 hbar L), sigma the
// single-particle width.
double short_time_lambda(const PhysicalParams& params, double t);

// The same expression evaluated with the relative width sigma_r = sqrt(2) sigma,
// which is 2 sqrt(2) times larger.
double short_time_lambda_relative_width(const PhysicalParams& params, double t);

// <v|rho|v> for v = (|1> + i|2>)/sqrt(2): (rho11 + rho22)/2 - Im rho12.
double nonquantumness_witness(const WeylMatrix& w);

} // namespace gravphase
