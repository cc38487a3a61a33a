#pragma once

#include <vector>

#include "gravphase/core.hpp"

namespace gravphase {

enum class FieldOrigin { quantum, classical };

// Real function on the (r, p) grid. Row-major with r as the slow index:
// values[i * p.n + j] is the value at (grid.r.at(i), grid.p.at(j)). Units 1/(J s).
struct WignerField {
    std::vector<double> values;
    PhaseSpaceGrid grid;
    double t = 0;
    FieldOrigin origin = FieldOrigin::quantum;

    double at(std::size_t i, std::size_t j) const { return values[i * grid.p.n + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * grid.p.n + j]; }
    double integral() const;
    double max_abs() const;
    std::vector<double> position_marginal() const;
    std::vector<double> momentum_marginal() const;
    // 2 pi hbar times the integral of W^2; 1 for pure states.
    double purity(double hbar) const;
    // Local cubic (4x4 Lagrange) interpolation; zero outside the grid.
    double interpolate(double r, double p) const;
};

struct MomentSet {
    double t = 0;
    double mean_r = 0;
    double mean_p = 0;
    double var_r = 0;
    double var_p = 0;
    double cov_rp = 0;
    double mu3_p = 0;
    double skew_p = 0;

    double second_moment_r() const { return var_r + mean_r * mean_r; }
};

MomentSet moments(const WignerField& field);

struct WignerMinimum {
    double value = 0;
    double r = 0;
    double p = 0;
    double raw_value = 0;
    double raw_r = 0;
    double raw_p = 0;
};

// Global grid minimum refined by a least-squares quadratic fit on the 3x3
// neighbourhood; the refinement is kept only when the fitted stationary point
// is a minimum lying inside that neighbourhood.
WignerMinimum wigner_min(const WignerField& field);

// Grid spanning n_sigma standard deviations around the mean in each variable.
PhaseSpaceGrid auto_phase_grid(const MomentSet& m, std::size_t n_r = 512, std::size_t n_p = 512,
                               double n_sigma = 8.0);

} // namespace gravphase
