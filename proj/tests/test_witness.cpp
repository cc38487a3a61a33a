#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gravphase/errors.hpp"
#include "gravphase/quantum.hpp"
#include "gravphase/witness.hpp"

using namespace gravphase;
using doctest::Approx;

namespace {

// (1/2) ∫_0^∞ k cos(k y) exp(-D^2 k^2 / 2) dk, the inverse-Radon kernel of a
// Gaussian window, by a fine trapezoid rule in u = k D.
double pattern_quadrature(double y, double delta) {
    const double s = y / delta, du = 2e-5;
    double acc = 0;
    for (double u = du; u < 14.0; u += du) acc += u * std::cos(u * s) * std::exp(-0.5 * u * u);
    return 0.5 * acc * du / (delta * delta);
}

double dawson_quadrature(double z) {
    const int n = 200000;
    const double h = z / n;
    double acc = 0.5 * (1.0 + std::exp(z * z));
    for (int i = 1; i < n; ++i) acc += std::exp((i * h) * (i * h));
    return std::exp(-z * z) * acc * h;
}

PhaseSpaceGrid square_grid(double half, std::size_t n) { return {{-half, half, n}, {-half, half, n}}; }

// Gaussian field with independent r, p widths and a centre.
WignerField gaussian_field(const PhaseSpaceGrid& g, double sr, double sp, double r0 = 0, double p0 = 0) {
    WignerField f;
    f.grid = g;
    f.values.resize(g.r.n * g.p.n);
    for (std::size_t i = 0; i < g.r.n; ++i)
        for (std::size_t j = 0; j < g.p.n; ++j) {
            const double u = (g.r.at(i) - r0) / sr, v = (g.p.at(j) - p0) / sp;
            f.at(i, j) = std::exp(-0.5 * (u * u + v * v)) / (2 * constants::pi * sr * sp);
        }
    return f;
}

// Kolmogorov-Smirnov statistic of standardized draws against N(0, 1).
double ks_normal(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double F = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        d = std::max({d, F - i / n, (i + 1) / n - F});
    }
    return d;
}

} // namespace

TEST_CASE("Dawson integral") {
    CHECK(dawson(0.0) == 0.0);
    for (double z : {0.1, 0.5, 1.0, 2.0, 4.0, 6.0})
        CHECK(dawson(z) == Approx(dawson_quadrature(z)).epsilon(1e-8));
    CHECK(dawson(-1.3) == Approx(-dawson(1.3)).epsilon(1e-15));
    CHECK(dawson(50.0) * 100.0 == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("pattern function") {
    CHECK(pattern_function(0.0, 0.04) == Approx(312.5).epsilon(1e-14));
    for (double s : {0.3, 1.0, 2.5, 5.9, 6.1, 9.0})
        CHECK(pattern_function(s * 0.04, 0.04) == Approx(pattern_quadrature(s * 0.04, 0.04)).epsilon(1e-6).scale(1e-3));
    for (double y : {0.01, 0.1, 0.5, 3.0})
        CHECK(pattern_function(-y, 0.04) == pattern_function(y, 0.04));
    // far tail approaches -1/(2 y^2)
    const double y = 20 * 0.04;
    CHECK(std::abs(pattern_function(y, 0.04) / (-0.5 / (y * y)) - 1.0) < 0.01);
    // one profile f with Gamma_D(y) = f(y / D) / D^2
    for (double s : {0.0, 0.7, 2.0, 4.5, 8.0, 15.0}) {
        const double f = pattern_function(s * 0.04, 0.04) * 0.04 * 0.04;
        CHECK(pattern_function(s * 0.02, 0.02) * 0.02 * 0.02 == Approx(f).epsilon(1e-12).scale(1e-12));
        CHECK(pattern_function(s * 0.08, 0.08) * 0.08 * 0.08 == Approx(f).epsilon(1e-12).scale(1e-12));
    }
    double l2 = 0;
    for (double s = -400; s <= 400; s += 1e-3) l2 += std::pow(pattern_function(s, 1.0), 2);
    CHECK(pattern_profile_l2() == Approx(l2 * 1e-3).epsilon(1e-4));
}

TEST_CASE("window validation") {
    WitnessConfig c;
    CHECK_NOTHROW(c.validate());
    c.delta = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.delta = 1 / std::sqrt(2.0);
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.delta = 0.04;
    c.center_p = NAN;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("Radon marginals") {
    const auto g = square_grid(8.0, 256);
    const double sr = 0.6, sp = 1.1;
    const WignerField f = gaussian_field(g, sr, sp, 0.3, -0.2);

    const auto m0 = radon_marginal(f, 0.0, 512);
    const auto pm = f.position_marginal();
    // resampling onto the marginal's own x grid costs cubic-interpolation error
    const double peak_r = *std::max_element(pm.begin(), pm.end());
    for (std::size_t i = 16; i < g.r.n - 16; i += 7)
        CHECK(std::abs(m0(g.r.at(i)) - pm[i]) < 1e-4 * peak_r);
    const auto m90 = radon_marginal(f, constants::pi / 2, 512);
    const auto qm = f.momentum_marginal();
    const double peak_p = *std::max_element(qm.begin(), qm.end());
    for (std::size_t j = 16; j < g.p.n - 16; j += 7)
        CHECK(std::abs(m90(g.p.at(j)) - qm[j]) < 1e-4 * peak_p);

    for (double phi : {0.0, 0.4, 1.0, constants::pi / 2, 2.5}) {
        const auto m = radon_marginal(f, phi, 1024);
        CHECK(m.mass() == Approx(1.0).epsilon(1e-8));
        double mean = 0, var = 0;
        for (std::size_t i = 0; i < m.density.size(); ++i) {
            CHECK(m.density[i] >= -1e-9);
            mean += m.x_at(i) * m.density[i] * m.dx;
        }
        for (std::size_t i = 0; i < m.density.size(); ++i) var += std::pow(m.x_at(i) - mean, 2) * m.density[i] * m.dx;
        const double c = std::cos(phi), s = std::sin(phi);
        CHECK(mean == Approx(0.3 * c - 0.2 * s).scale(1.0).epsilon(1e-6));
        CHECK(var == Approx(c * c * sr * sr + s * s * sp * sp).epsilon(1e-6));
    }
}

TEST_CASE("direct witness") {
    // spacing 0.005 resolves every window below
    const auto g = square_grid(5.0, 2048);
    const WignerField vac = vacuum_field(g);
    for (double d : {0.02, 0.04, 0.2, 0.6}) {
        WitnessConfig c{d, 0, 0};
        CHECK(direct_witness(vac, c) == Approx(1 / (2 * constants::pi * (d * d + 0.5))).epsilon(1e-8));
    }
    CHECK(1 / (2 * constants::pi * (0.04 * 0.04 + 0.5)) == Approx(0.3173).epsilon(1e-3));
    // off-centre window: Gaussian convolution at distance a
    WitnessConfig c{0.1, 0.5, -0.3};
    const double a2 = 0.25 + 0.09, s2 = 0.01 + 0.5;
    CHECK(direct_witness(vac, c) == Approx(std::exp(-a2 / (2 * s2)) / (2 * constants::pi * s2)).epsilon(1e-8));

    WitnessConfig edge{0.04, 4.95, 0};
    CHECK_THROWS_AS(direct_witness(vac, edge), InvalidArgument);
}

TEST_CASE("witness soundness on nonnegative fields") {
    std::mt19937_64 eng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto g = square_grid(5.0, 128);
    for (int k = 0; k < 100; ++k) {
        WignerField f;
        f.grid = g;
        f.values.assign(g.r.n * g.p.n, 0.0);
        // sparse spikes, smooth bumps or white noise, all nonnegative
        const int kind = k % 3;
        for (std::size_t i = 0; i < g.r.n; ++i)
            for (std::size_t j = 0; j < g.p.n; ++j) {
                double v = 0;
                if (kind == 0) v = U(eng) < 0.01 ? U(eng) : 0.0;
                if (kind == 1) v = std::exp(-std::pow(g.r.at(i) - 2 * U(eng), 2)) * U(eng);
                if (kind == 2) v = U(eng);
                f.at(i, j) = v;
            }
        WitnessConfig c{0.02 + 0.5 * U(eng), 2 * U(eng) - 1, 2 * U(eng) - 1};
        CHECK(direct_witness(f, c) >= 0.0);
    }
}

TEST_CASE("tomographic identity") {
    const auto g = square_grid(7.0, 512);
    const std::vector<WignerField> fields{vacuum_field(g), gaussian_field(g, 0.5, 1.0, 0.4, -0.6),
                                          gaussian_field(g, 1.2, 0.7, -0.5, 0.2)};
    for (const auto& f : fields)
        for (WitnessConfig c : {WitnessConfig{0.15, 0, 0}, WitnessConfig{0.3, 0.5, 0.3}, WitnessConfig{0.2, -0.4, -0.8}}) {
            const double direct = direct_witness(f, c);
            CHECK(tomographic_witness(f, c, 128, 2048) == Approx(direct).epsilon(1e-4));
        }
}

TEST_CASE("homodyne sampling") {
    const auto g = square_grid(8.0, 256);
    const double sr = 0.6, sp = 1.1;
    const WignerField f = gaussian_field(g, sr, sp);
    const MarginalSet set(f, 256, 2048);
    const std::size_t n = 100000;
    const auto s = sample_homodyne(set, n, 42);
    REQUIRE(s.size() == n);

    std::vector<double> z;
    std::vector<int> hist(20, 0);
    for (const auto& q : s) {
        CHECK_FALSE((q.phi < 0 || q.phi >= constants::pi));
        z.push_back(q.x / std::hypot(sr * std::cos(q.phi), sp * std::sin(q.phi)));
        ++hist[std::min<std::size_t>(19, static_cast<std::size_t>(q.phi / constants::pi * 20))];
    }
    // KS critical value at the 1% level
    CHECK(ks_normal(z) < 1.628 / std::sqrt(static_cast<double>(n)));
    double chi2 = 0;
    for (int h : hist) chi2 += std::pow(h - n / 20.0, 2) / (n / 20.0);
    CHECK(chi2 < 36.19); // chi^2_{19} at 1%

    // x given phi = 0 against the position marginal
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> z0;
    for (std::size_t i = 0; i < n; ++i) z0.push_back(set.draw(0.0, U(eng), U(eng)).x / sr);
    CHECK(ks_normal(z0) < 1.628 / std::sqrt(static_cast<double>(n)));

    const auto again = sample_homodyne(set, 5000, 42);
    const auto other = sample_homodyne(set, 5000, 43);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < 5000; ++i) {
        same = same && again[i].phi == s[i].phi && again[i].x == s[i].x;
        differs = differs || other[i].x != s[i].x;
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("witness estimator on the vacuum") {
    const auto g = square_grid(7.0, 256);
    const WignerField vac = vacuum_field(g);
    const MarginalSet set(vac, 512, 4096);
    WitnessConfig c{0.04, 0, 0};
    const auto s = sample_homodyne(set, 1000000, 7);
    const WitnessEstimate e = estimate_witness(s, c);
    CHECK(e.count == 1000000);
    CHECK(std::abs(e.value - direct_witness(vac, c)) < 3 * e.standard_error);
    CHECK(e.standard_error == Approx(std::sqrt(e.gamma_variance / 1e6) / constants::pi).epsilon(1e-12));

    const double cg = c_gamma(set, c);
    // vacuum: <p(0|phi)> = 1/sqrt(pi)
    CHECK(cg == Approx(pattern_profile_l2() / std::sqrt(constants::pi)).epsilon(1e-3));
    const double ratio = e.gamma_variance / (cg / std::pow(c.delta, 3));
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
    // Var(Gamma) at this window width is of order 10^3
    CHECK(std::abs(std::log10(e.gamma_variance) - 3.0) <= 1.0);

    CHECK_THROWS_AS(estimate_witness(std::vector<QuadratureSample>(99), c), InvalidArgument);
}

TEST_CASE("perturbative estimate") {
    const PhysicalParams p;
    const auto e = perturbative_wigner(p, 40.0);
    CHECK(e.epsilon == Approx(perturbation_strength(p, 40.0)));
    CHECK(e.p0 > -0.42 * 1.5);
    CHECK(e.p0 < -0.42 * 0.5);
    CHECK(e.tail_min < 0);
    CHECK(std::abs(std::log10(-e.tail_min) + 4.0) <= 1.0);
    REQUIRE(e.delta_star.has_value());
    CHECK(*e.delta_star > 0.02);
    CHECK(*e.delta_star < 0.08);
    CHECK(e.n_opt <= 0);
    // windowed value with a vanishing window reduces to the pointwise tail
    CHECK(perturbative_windowed(p, 40.0, 1e-4, e.p0) == Approx(e.tail_min).epsilon(1e-3));
    CHECK(perturbative_windowed(p, 40.0, 0.2, e.p0) > 0);

    const auto weak = perturbative_wigner(p, 1e-3);
    CHECK_FALSE(weak.delta_star.has_value());
    CHECK(weak.tail_min > 0);

    PhysicalParams strong = p;
    strong.G *= 100;
    CHECK_THROWS_AS(perturbative_wigner(strong, 40.0), InvalidArgument);
}

TEST_CASE("sample complexity") {
    const double m = sample_complexity({0.04, 0, 0}, -1e-4, 0.1);
    CHECK(std::abs(std::log10(m) - 11.0) <= 1.0);
    CHECK(m == Approx(0.1 / std::pow(0.04, 3) / 1e-8).epsilon(1e-12));
    CHECK(sample_complexity({0.02, 0, 0}, -1e-4, 0.1) == Approx(8 * m).epsilon(1e-12));
    CHECK_THROWS_AS(sample_complexity({0.04, 0, 0}, 0.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(sample_complexity({0.04, 0, 0}, 1e-4, 0.1), InvalidArgument);
}

TEST_CASE("windowed witness of the evolved cubic state") {
    const PhysicalParams p;
    const DerivedScales sc = derive_scales(p);
    const auto spec = PotentialSpec::truncated(p);
    const auto st = evolve_quantum(initial_gaussian(p, auto_position_grid(p, 40.0)), spec, 40.0, 0.005).back();
    const WitnessConfig start{0.04, 0.0, -0.8};
    // patch quadrature is converged at the default size
    CHECK(std::abs(state_witness(st, start, sc) - state_witness(st, start, sc, 256)) < 1e-8);

    const WitnessConfig best = optimize_witness_center(st, start, sc);
    const double n = state_witness(st, best, sc);
    CHECK(n <= state_witness(st, start, sc));
    CHECK(n < 0);
    CHECK(std::abs(std::log10(-n) + 4.0) <= 1.0);
    // the initial Gaussian gives a positive value at the same window
    CHECK(state_witness(initial_gaussian(p, auto_position_grid(p, 40.0)), best, sc) > 0);
}
