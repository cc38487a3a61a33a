#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gravphase/errors.hpp"
#include "gravphase/witness.hpp"

namespace gravphase {

MarginalSet::MarginalSet(const WignerField& field, std::size_t n_angles, std::size_t n_x) {
    if (n_angles < 2) throw InvalidArgument("need at least 2 angles");
    marginals_.resize(n_angles + 1);
    bool failed = false;
    std::string reason;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t k = 0; k < n_angles; ++k) {
        try {
            const double phi = static_cast<double>(k) * constants::pi / static_cast<double>(n_angles);
            marginals_[k] = radon_marginal(field, phi, n_x);
        } catch (const std::exception& e) {
#pragma omp critical
            {
                failed = true;
                reason = e.what();
            }
        }
    }
    if (failed) throw NumericalError(reason);

    // phi = pi is phi = 0 with x -> -x
    QuadratureMarginal& last = marginals_[n_angles];
    const QuadratureMarginal& first = marginals_[0];
    last.phi = constants::pi;
    last.dx = first.dx;
    last.x_min = -first.x_at(first.density.size() - 1);
    last.density.assign(first.density.rbegin(), first.density.rend());

    cdf_.resize(marginals_.size());
    for (std::size_t k = 0; k < marginals_.size(); ++k) {
        auto& d = marginals_[k].density;
        for (auto& v : d) {
            if (v < -1e-9) {
                std::ostringstream msg;
                msg << "quadrature marginal at phi=" << marginals_[k].phi << " is negative (" << v << ")";
                throw NumericalError(msg.str());
            }
            v = std::max(v, 0.0);
        }
        const double mass = marginals_[k].mass();
        for (auto& v : d) v /= mass;
        auto& c = cdf_[k];
        c.assign(d.size(), 0.0);
        for (std::size_t i = 1; i < d.size(); ++i) c[i] = c[i - 1] + 0.5 * (d[i - 1] + d[i]) * marginals_[k].dx;
        const double end = c.back();
        for (auto& v : c) v /= end;
    }
}

double MarginalSet::density(double phi, double x) const {
    const double K = static_cast<double>(angles());
    const double pos = std::clamp(phi / constants::pi * K, 0.0, K);
    const auto k = std::min(static_cast<std::size_t>(pos), angles() - 1);
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * marginals_[k](x) + w * marginals_[k + 1](x);
}

double MarginalSet::invert(std::size_t k, double u) const {
    const auto& c = cdf_[k];
    const auto it = std::upper_bound(c.begin(), c.end(), u);
    std::size_t i = it == c.begin() ? 0 : static_cast<std::size_t>(it - c.begin()) - 1;
    i = std::min(i, c.size() - 2);
    const double span = c[i + 1] - c[i];
    const double f = span > 0 ? (u - c[i]) / span : 0.5;
    return marginals_[k].x_at(i) + f * marginals_[k].dx;
}

QuadratureSample MarginalSet::draw(double u_phi, double u_pick, double u_x) const {
    const double K = static_cast<double>(angles());
    const double phi = u_phi * constants::pi;
    const double pos = u_phi * K;
    const auto k = std::min(static_cast<std::size_t>(pos), angles() - 1);
    const double w = pos - static_cast<double>(k);
    const std::size_t idx = u_pick < w ? k + 1 : k;
    return {phi, invert(idx, u_x)};
}

std::vector<QuadratureSample> sample_homodyne(const MarginalSet& marginals, std::size_t count, std::uint64_t seed,
                                              std::size_t chunk) {
    if (chunk == 0) throw InvalidArgument("chunk size must be positive");
    std::vector<QuadratureSample> out(count);
    const std::size_t n_chunks = (count + chunk - 1) / chunk;
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < n_chunks; ++c) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        std::mt19937_64 eng(seq);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const std::size_t end = std::min(count, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) {
            const double a = U(eng), b = U(eng), x = U(eng);
            out[i] = marginals.draw(a, b, x);
        }
    }
    return out;
}

std::vector<QuadratureSample> sample_homodyne(const WignerField& field, std::size_t count, std::uint64_t seed,
                                              std::size_t n_angles, std::size_t n_x) {
    const MarginalSet set(field, n_angles, n_x);
    return sample_homodyne(set, count, seed);
}

WitnessEstimate estimate_witness(const std::vector<QuadratureSample>& samples, const WitnessConfig& cfg) {
    cfg.validate();
    if (samples.size() < 100) throw InvalidArgument("estimate_witness needs at least 100 samples");
    const std::size_t n = samples.size();
    std::vector<double> gamma(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[i];
        const double x0 = cfg.center_r * std::cos(s.phi) + cfg.center_p * std::sin(s.phi);
        gamma[i] = pattern_function(s.x - x0, cfg.delta);
    }
    double mean = 0;
    for (double g : gamma) mean += g;
    mean /= static_cast<double>(n);
    double var = 0;
    for (double g : gamma) var += (g - mean) * (g - mean);
    var /= static_cast<double>(n - 1);

    WitnessEstimate e;
    e.count = n;
    e.value = mean / constants::pi;
    e.standard_error = std::sqrt(var / static_cast<double>(n)) / constants::pi;
    e.gamma_variance = var;
    return e;
}

} // namespace gravphase
