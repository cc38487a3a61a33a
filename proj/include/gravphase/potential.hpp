#pragma once

#include <array>

#include "gravphase/core.hpp"

namespace gravphase {

enum class PotentialKind { free, exact, truncated };

// Potential acting on the relative coordinate r (displacement from the
// initial separation L). The truncated form is the Taylor polynomial of
// -G m^2 / (L + r) through order N, with theta multiplying the cubic term.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::truncated;
    int N = 3;
    double theta = 1.0;
    PhysicalParams params;

    static PotentialSpec free(const PhysicalParams& p);
    static PotentialSpec exact(const PhysicalParams& p);
    static PotentialSpec truncated(const PhysicalParams& p);               // uses p.N, p.theta
    static PotentialSpec truncated(const PhysicalParams& p, int N, double theta = 1.0);

    void validate() const;

    double value(double r) const;
    double derivative(double r) const;
    // Coefficient of r^n in the truncated polynomial; zero for n > N.
    double coefficient(int n) const;
    // Half the curvature at r = 0 (the r^2 coefficient), used for the
    // Gaussian part of the flow.
    double quadratic_coefficient() const;
};

double v_exact(double r, const PhysicalParams& params);
double v_exact_derivative(double r, const PhysicalParams& params);
double v_truncated(double r, const PotentialSpec& spec);

using Vec2 = std::array<double, 2>;

// Interaction part of the planar two-body potential: the Taylor expansion
// through `order` of V(r1,r2) - V(r1,0) - V(0,r2) + V(0,0), with mass 1 at the
// origin and mass 2 at (L, 0). Order 2 is 1/2 m w^2 (x1 x2 - y1 y2 / 2); order 3
// adds the cross-axis terms 3 m w^2/(4L) ((x2-x1) y1 y2 + (x1 y2^2 - x2 y1^2)/2)
// and the same-axis term 3 m w^2/(4L) x1 x2 (x1 - x2).
double v_multipole_2d(const Vec2& r1, const Vec2& r2, int order, const PhysicalParams& params);

// Gradient (dV/dx1, dV/dy1, dV/dx2, dV/dy2) of v_multipole_2d.
std::array<double, 4> v_multipole_2d_gradient(const Vec2& r1, const Vec2& r2, int order,
                                              const PhysicalParams& params);

// Full planar Newtonian potential -G m^2 / |L e_x + r2 - r1|.
double v_exact_2d(const Vec2& r1, const Vec2& r2, const PhysicalParams& params);

} // namespace gravphase
