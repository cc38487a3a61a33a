#include <cmath>

#include <gsl/gsl_sf_dawson.h>

#include "gravphase/errors.hpp"
#include "gravphase/witness.hpp"

namespace gravphase {

double dawson(double z) { return gsl_sf_dawson(z); }

namespace {

// 1 - 2 z F(z). Beyond |z| = 10 the direct form loses digits to cancellation,
// so the asymptotic series -sum_{n>=1} (2n-1)!! / (2 z^2)^n is used instead.
double pattern_core(double z) {
    const double az = std::abs(z);
    if (az <= 10.0) return 1.0 - 2.0 * z * gsl_sf_dawson(z);
    const double x = 1.0 / (2.0 * z * z);
    double term = 1.0, sum = 0.0;
    for (int n = 1; n <= 30; ++n) {
        term *= (2.0 * n - 1.0) * x;
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return -sum;
}

} // namespace

double pattern_function(double y, double delta) {
    if (!(delta > 0)) throw InvalidArgument("window width must be positive");
    const double z = y / (std::sqrt(2.0) * delta);
    return pattern_core(z) / (2.0 * delta * delta);
}

double pattern_profile_l2() {
    static const double value = [] {
        // f(u) = (1 - 2 z F(z)) / 2, z = u / sqrt(2); even in u.
        const double U = 200.0;
        const std::size_t n = 400000;
        const double h = U / static_cast<double>(n);
        auto f2 = [](double u) {
            const double f = 0.5 * pattern_core(u / std::sqrt(2.0));
            return f * f;
        };
        double s = f2(0.0) + f2(U);
        for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f2(static_cast<double>(i) * h);
        const double half = s * h / 3.0 + 1.0 / (12.0 * U * U * U);
        return 2.0 * half;
    }();
    return value;
}

} // namespace gravphase
