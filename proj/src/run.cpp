#include "gravphase/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <tuple>

#include "gravphase/classical.hpp"
#include "gravphase/csv.hpp"
#include "gravphase/errors.hpp"
#include "gravphase/fock.hpp"
#include "gravphase/gaussian.hpp"
#include "gravphase/moments.hpp"
#include "gravphase/quantum.hpp"
#include "gravphase/snapshot.hpp"
#include "gravphase/witness.hpp"

namespace fs = std::filesystem;

namespace gravphase {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Column {
    std::string name;
    std::string unit;
};

class Context {
public:
    Context(const RunConfig& cfg, std::ostream& log)
        : cfg(cfg), log(log), spec(potential_of(cfg)), scales(derive_scales(cfg.params)), digest(config_digest(cfg)) {
        times = cfg.checkpoints;
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
    }

    const RunConfig& cfg;
    std::ostream& log;
    PotentialSpec spec;
    DerivedScales scales;
    std::uint64_t digest;
    std::vector<double> times;
    RunOutcome outcome;

    double t_final() const { return times.back(); }

    std::vector<std::pair<std::string, std::string>> metadata() const {
        return {{"experiment", cfg.experiment},
                {"config_digest", hex64(digest)},
                {"seed", std::to_string(cfg.seed)},
                {"potential", cfg.potential},
                {"N", std::to_string(cfg.params.N)},
                {"theta", format_double(cfg.params.theta)},
                {"omega", format_double(scales.omega)},
                {"xunit", format_double(scales.xunit)},
                {"punit", format_double(scales.punit)}};
    }

    CsvWriter table(const std::vector<Column>& cols, std::vector<std::pair<std::string, std::string>> extra = {}) {
        columns_ = cols;
        auto meta = metadata();
        meta.insert(meta.end(), extra.begin(), extra.end());
        std::vector<std::string> names;
        for (const auto& c : cols) names.push_back(c.name);
        const fs::path path = cfg.output / (cfg.experiment + ".csv");
        outcome.table = path;
        outcome.files.push_back(path);
        return CsvWriter(path, names, meta);
    }

    void snapshot(const std::string& stem, std::size_t index, const SnapshotData& data) {
        if (!cfg.snapshots) return;
        const fs::path dir = cfg.output / "snapshots";
        fs::create_directories(dir);
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04zu.wwps", stem.c_str(), index);
        write_snapshot(dir / name, data, digest);
        outcome.files.push_back(dir / name);
    }

    void write_metadata(const std::vector<std::string>& notes = {}) {
        const fs::path path = cfg.output / "metadata.txt";
        std::ofstream out(path);
        out << "experiment: " << cfg.experiment << "\n";
        out << "config_digest: " << hex64(digest) << "\n";
        out << "\n[columns]\n";
        for (const auto& c : columns_) out << c.name << " [" << c.unit << "]\n";
        if (!notes.empty()) {
            out << "\n[notes]\n";
            for (const auto& n : notes) out << n << "\n";
        }
        out << "\n[config]\n" << canonical_config(cfg);
        outcome.files.push_back(path);
    }

    // Quantum states at every checkpoint, t = 0 included when requested.
    std::vector<WavefunctionState> quantum_states() const {
        const Grid1D grid = auto_position_grid(cfg.params, t_final(), cfg.n_wave, cfg.wave_n_sigma);
        WavefunctionState psi0 = initial_gaussian(cfg.params, grid);
        const double dt = stable_time_step(grid, spec, cfg.dt);
        log << "quantum: " << grid.n << " points on [" << grid.min << ", " << grid.max << "] m, dt = " << dt
            << " s\n";
        auto states = evolve_quantum(psi0, spec, t_final(), dt, times);
        // keep exactly the requested checkpoints
        std::vector<WavefunctionState> out;
        for (double t : times) {
            auto it = std::min_element(states.begin(), states.end(), [t](const auto& a, const auto& b) {
                return std::abs(a.t - t) < std::abs(b.t - t);
            });
            out.push_back(*it);
        }
        return out;
    }

    PhaseSpaceGrid phase_grid(const MomentSet& m) const { return auto_phase_grid(m, cfg.n_r, cfg.n_p, cfg.n_sigma); }

    // Moment-based grid whose momentum axis is widened, if needed, until each
    // momentum tail left outside carries less than 1e-10.
    PhaseSpaceGrid phase_grid(const WavefunctionState& s) const {
        PhaseSpaceGrid g = phase_grid(moments(s, cfg.params.hbar));
        const auto dist = momentum_distribution(s, cfg.params.hbar);
        std::vector<std::size_t> order(dist.p.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return dist.p[a] < dist.p[b]; });
        double lo = dist.p[order.front()], hi = dist.p[order.back()], acc = 0;
        for (auto i : order) {
            acc += dist.prob[i];
            if (acc > 1e-10) break;
            lo = dist.p[i];
        }
        acc = 0;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            acc += dist.prob[*it];
            if (acc > 1e-10) break;
            hi = dist.p[*it];
        }
        const double pad = 2.0 * g.p.step();
        g.p.min = std::min(g.p.min, lo - pad);
        g.p.max = std::max(g.p.max, hi + pad);
        return g;
    }

    // Mean carried by the classical flow, covariance by the quadratic part.
    MomentSet classical_moments(double t) const {
        const GaussianDensity g = initial_density(cfg.params);
        CharacteristicFlow flow(spec);
        double r = g.mean_r, p = g.mean_p;
        flow.advance(r, p, t, flow.default_steps(t));
        const auto S = quadratic_flow(scales.mu, spec.quadratic_coefficient(), t);
        MomentSet m;
        m.t = t;
        m.mean_r = r;
        m.mean_p = p;
        m.var_r = S[0] * S[0] * g.var_r + S[1] * S[1] * g.var_p;
        m.var_p = S[2] * S[2] * g.var_r + S[3] * S[3] * g.var_p;
        m.cov_rp = S[0] * S[2] * g.var_r + S[1] * S[3] * g.var_p;
        return m;
    }

private:
    std::vector<Column> columns_;
};

// Grid point of the smallest value within n_std standard deviations of the
// mean, so that edge round-off never wins over the physical tail.
std::pair<double, double> interior_min(const WignerField& f, double n_std) {
    const MomentSet m = moments(f);
    const double sr = n_std * std::sqrt(m.var_r), sp = n_std * std::sqrt(m.var_p);
    double best = std::numeric_limits<double>::infinity();
    std::pair<double, double> at{m.mean_r, m.mean_p};
    for (std::size_t i = 0; i < f.grid.r.n; ++i) {
        const double r = f.grid.r.at(i);
        if (std::abs(r - m.mean_r) > sr) continue;
        for (std::size_t j = 0; j < f.grid.p.n; ++j) {
            const double p = f.grid.p.at(j);
            if (std::abs(p - m.mean_p) > sp || f.at(i, j) >= best) continue;
            best = f.at(i, j);
            at = {r, p};
        }
    }
    return at;
}

void run_evolve_quantum(Context& c) {
    const double hbar = c.cfg.params.hbar;
    auto csv = c.table({{"t", "s"},
                        {"norm", "1"},
                        {"energy", "J"},
                        {"mean_r", "m"},
                        {"mean_p", "kg m/s"},
                        {"var_r", "m^2"},
                        {"var_p", "(kg m/s)^2"},
                        {"cov_rp", "J s"},
                        {"skew_p", "1"},
                        {"wigner_min", "hbar*W, dimensionless"},
                        {"wigner_min_r", "m"},
                        {"wigner_min_p", "kg m/s"}});
    const auto states = c.quantum_states();
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& s = states[k];
        const MomentSet m = moments(s, hbar);
        const WignerField w = wigner_of(s, c.phase_grid(s), hbar);
        const WignerMinimum wm = wigner_min(w);
        csv.row({s.t, s.norm(), energy(s, c.spec), m.mean_r, m.mean_p, m.var_r, m.var_p, m.cov_rp, m.skew_p,
                 hbar * wm.value, wm.r, wm.p});
        c.snapshot("wavefunction", k, s);
        c.snapshot("wigner", k, w);
    }
    c.write_metadata();
}

void run_evolve_classical(Context& c) {
    const double hbar = c.cfg.params.hbar;
    auto csv = c.table({{"t", "s"},
                        {"field_min", "hbar*f, dimensionless"},
                        {"integral", "1"},
                        {"mean_r", "m"},
                        {"mean_p", "kg m/s"},
                        {"var_r", "m^2"},
                        {"var_p", "(kg m/s)^2"},
                        {"skew_p", "1"}});
    const InitialDensity f0 = initial_density(c.cfg.params);
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        const double t = c.times[k];
        const WignerField f = evolve_classical(f0, c.spec, t, c.phase_grid(c.classical_moments(t)));
        const MomentSet m = moments(f);
        const double fmin = *std::min_element(f.values.begin(), f.values.end());
        csv.row({t, hbar * fmin, f.integral(), m.mean_r, m.mean_p, m.var_r, m.var_p, m.skew_p});
        c.snapshot("liouville", k, f);
    }
    c.write_metadata();
}

void run_equivalence(Context& c) {
    const double hbar = c.cfg.params.hbar;
    auto csv = c.table({{"t", "s"},
                        {"omega_t", "1"},
                        {"max_w", "1/(J s)"},
                        {"linf", "1/(J s)"},
                        {"linf_rel", "1"}});
    const auto states = c.quantum_states();
    const InitialDensity f0 = initial_density(c.cfg.params);
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& s = states[k];
        const WignerField wq = wigner_of(s, c.phase_grid(s), hbar);
        const WignerField wc = evolve_classical(f0, c.spec, s.t, wq.grid);
        double linf = 0;
        for (std::size_t i = 0; i < wq.values.size(); ++i) linf = std::max(linf, std::abs(wq.values[i] - wc.values[i]));
        const double mx = wq.max_abs();
        csv.row({s.t, c.scales.omega * s.t, mx, linf, linf / mx});
        c.snapshot("wigner", k, wq);
        c.snapshot("liouville", k, wc);
    }
    c.write_metadata({"linf is the largest |W_quantum - f_classical| over the shared grid"});
}

void run_gaussian(Context& c) {
    const auto& p = c.cfg.params;
    const int n1 = c.cfg.gaussian_n1, n2 = c.cfg.gaussian_n2;
    auto csv = c.table({{"t", "s"},
                        {"omega_t", "1"},
                        {"E", "bits"},
                        {"E_00", "bits"},
                        {"E_short", "bits"},
                        {"nu_minus", "J s"},
                        {"var_r", "m^2"}},
                       {{"n1", std::to_string(n1)}, {"n2", std::to_string(n2)}});
    const CovarianceMatrix com0 = frame_transform(initial_covariance(n1, n2, p));
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        const double t = c.times[k];
        const CovarianceMatrix com = evolve_covariance(com0, t, p);
        const CovarianceMatrix lab = frame_transform(com);
        const double e_short = (n1 == 0 && n2 >= 1 && t > 0) ? short_time_E0n(n2, t, p) : nan;
        csv.row({t, c.scales.omega * t, log_negativity(lab, p.hbar), log_negativity_at(0, 0, t, p), e_short,
                 partial_transpose_eigenvalues(lab).minus, com.sigma(2, 2)});
        c.snapshot("covariance", k, lab);
    }
    c.write_metadata({"E_short is the small-t expansion, defined only for (n1, n2) = (0, n >= 1)"});
}

void run_witness_wigner(Context& c) {
    const double hbar = c.cfg.params.hbar;
    std::vector<std::pair<std::string, std::string>> extra;
    std::vector<std::string> notes;
    try {
        const PerturbativeEstimate pe = perturbative_wigner(c.cfg.params, c.t_final());
        extra = {{"perturbative_epsilon", format_double(pe.epsilon)},
                 {"perturbative_p0", format_double(pe.p0)},
                 {"perturbative_tail_min", format_double(pe.tail_min)},
                 {"perturbative_delta_star", pe.delta_star ? format_double(*pe.delta_star) : "none"},
                 {"perturbative_n_opt", format_double(pe.n_opt)}};
        if (pe.delta_star && pe.n_opt < 0) {
            WitnessConfig w = *c.cfg.witness;
            w.delta = *pe.delta_star;
            extra.emplace_back("sample_complexity_c0.1", format_double(sample_complexity(w, pe.n_opt, 0.1)));
        }
    } catch (const InvalidArgument& e) {
        notes.push_back(std::string("no first-order estimate: ") + e.what());
    }
    auto csv = c.table({{"t", "s"},
                        {"omega_t", "1"},
                        {"wigner_min", "hbar*W, dimensionless"},
                        {"wigner_min_r", "xunit"},
                        {"wigner_min_p", "punit"},
                        {"skew_p", "1"},
                        {"witness", "dimensionless"},
                        {"center_r", "xunit"},
                        {"center_p", "punit"},
                        {"epsilon", "1"}},
                       extra);
    const auto states = c.quantum_states();
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& s = states[k];
        const MomentSet m = moments(s, hbar);
        const WignerField w = to_dimensionless(wigner_of(s, c.phase_grid(s), hbar), c.scales);
        const WignerMinimum wm = wigner_min(w);
        WitnessConfig wc = *c.cfg.witness;
        if (c.cfg.witness_auto_center) {
            std::tie(wc.center_r, wc.center_p) = interior_min(w, 4.0);
            wc = optimize_witness_center(s, wc, c.scales);
        }
        csv.row({s.t, c.scales.omega * s.t, wm.value, wm.r, wm.p, m.skew_p, state_witness(s, wc, c.scales), wc.center_r,
                 wc.center_p, perturbation_strength(c.cfg.params, s.t)});
        c.snapshot("wigner", k, w);
    }
    notes.push_back("witness is the Gaussian-windowed integral of hbar*W around the centre");
    c.write_metadata(notes);
}

void run_witness_weyl(Context& c) {
    const auto& p = c.cfg.params;
    auto csv = c.table({{"t", "s"},
                        {"omega_t", "1"},
                        {"lambda_min", "1"},
                        {"lambda_min_12", "1"},
                        {"lambda_short_time", "1"},
                        {"witness", "1"},
                        {"rho11", "1"},
                        {"rho22", "1"},
                        {"re_rho12", "1"},
                        {"im_rho12", "1"},
                        {"leakage", "1"}},
                       {{"basis_dim", std::to_string(c.cfg.weyl_dim)}, {"frame", c.cfg.weyl_frame}});
    const InitialDensity f0 = initial_density(p);
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        const double t = c.times[k];
        const WignerField f = evolve_classical(f0, c.spec, t, c.phase_grid(c.classical_moments(t)));
        const MomentSet m = moments(f);
        const FockBasis basis = c.cfg.weyl_frame == "interaction"
                                    ? FockBasis::interaction_frame(p, c.spec, t, m.mean_r, m.mean_p, c.cfg.weyl_dim)
                                    : FockBasis::ground_state(p, c.cfg.weyl_dim);
        const WeylMatrix w = weyl_fock_matrix(f, basis);
        if (w.leakage_warning()) c.log << "warning: Fock leakage " << w.leakage << " at t = " << t << " s\n";
        const auto& r = w.rho;
        csv.row({t, c.scales.omega * t, min_eigenvalue(w), lambda_12(w), short_time_lambda(p, t),
                 nonquantumness_witness(w), r(1, 1).real(), r(2, 2).real(), r(1, 2).real(), r(1, 2).imag(),
                 w.leakage});
        c.snapshot("weyl", k, w);
    }
    c.write_metadata({"lambda_short_time is the short-time formula -3 m omega^2 sigma^3 t / (4 hbar L)",
                      "leakage is the trace deficit of the truncated Fock matrix"});
}

void run_sample(Context& c) {
    const double hbar = c.cfg.params.hbar;
    auto csv = c.table({{"t", "s"},
                        {"witness", "dimensionless"},
                        {"standard_error", "dimensionless"},
                        {"direct", "dimensionless"},
                        {"c_gamma", "1"},
                        {"gamma_variance", "1"},
                        {"count", "1"},
                        {"significance", "1"},
                        {"center_r", "xunit"},
                        {"center_p", "punit"}},
                       {{"delta", format_double(c.cfg.witness->delta)}});
    const auto states = c.quantum_states();
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& s = states[k];
        const WignerField w = to_dimensionless(wigner_of(s, c.phase_grid(s), hbar), c.scales);
        WitnessConfig wc = *c.cfg.witness;
        if (c.cfg.witness_auto_center) {
            std::tie(wc.center_r, wc.center_p) = interior_min(w, 4.0);
            wc = optimize_witness_center(s, wc, c.scales);
        }
        const MarginalSet set(w, c.cfg.sample_angles, c.cfg.sample_nx);
        const auto samples = sample_homodyne(set, c.cfg.sample_count, c.cfg.seed + k);
        const WitnessEstimate est = estimate_witness(samples, wc);
        const double direct = state_witness(s, wc, c.scales);
        const double se = est.standard_error;
        csv.row({s.t, est.value, se, direct, c_gamma(set, wc), est.gamma_variance, static_cast<double>(est.count),
                 se > 0 ? est.value / se : 0.0, wc.center_r, wc.center_p});
        if (c.cfg.sample_export) {
            char name[48];
            std::snprintf(name, sizeof name, "samples_%04zu.csv", k);
            std::ofstream out(c.cfg.output / name);
            out << samples_to_csv(samples);
            c.outcome.files.push_back(c.cfg.output / name);
        }
        c.snapshot("wigner", k, w);
    }
    c.write_metadata({"checkpoint k draws with seed + k", "significance = witness / standard_error"});
}

void run_moments(Context& c) {
    const auto& p = c.cfg.params;
    auto csv = c.table({{"t", "s"},
                        {"mean_r", "m"},
                        {"mean_p", "kg m/s"},
                        {"r2", "m^2"},
                        {"C", "kg m^2/s^2"},
                        {"dC_dt_fd", "kg m^2/s^3"},
                        {"dC_dt_ehrenfest", "kg m^2/s^3"},
                        {"skew_p", "1"},
                        {"mu3_p", "(kg m/s)^3"}});
    const auto states = c.quantum_states();
    std::vector<MomentSet> traj;
    for (const auto& s : states) traj.push_back(moments(s, p.hbar));
    const auto fd = traj.size() >= 2 ? c_rate_finite_difference(traj, p) : std::vector<double>(traj.size(), nan);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& m = traj[k];
        csv.row({m.t, m.mean_r, m.mean_p, m.second_moment_r(), c_value(m, p), fd[k], c_rate_ehrenfest(m, p), m.skew_p,
                 m.mu3_p});
        c.snapshot("wavefunction", k, states[k]);
    }
    c.write_metadata({"C = <p>^2/m - m omega^2 (<r> - L/2)^2 / 4"});
}

void run_ensemble(Context& c) {
    const CorrelationReport rep = ensemble_2d(*c.cfg.ensemble, c.cfg.params);
    auto csv = c.table({{"n_traj", "1"},
                        {"steps", "1"},
                        {"x1_y2y2", "m^3"},
                        {"x1_y2y2_se", "m^3"},
                        {"x2_y1y1", "m^3"},
                        {"x2_y1y1_se", "m^3"},
                        {"dx_y1y2", "m^3"},
                        {"dx_y1y2_se", "m^3"},
                        {"max_energy_drift", "1"}},
                       {{"order", std::to_string(c.cfg.ensemble->order)}});
    csv.row({static_cast<double>(rep.n_traj), static_cast<double>(rep.steps), rep.x1_y2y2.value,
             rep.x1_y2y2.standard_error, rep.x2_y1y1.value, rep.x2_y1y1.standard_error, rep.dx_y1y2.value,
             rep.dx_y1y2.standard_error, rep.max_energy_drift});
    const fs::path txt = c.cfg.output / "ensemble-2d.txt";
    std::ofstream(txt) << rep.to_text();
    c.outcome.files.push_back(txt);
    c.write_metadata({"standard errors from bootstrap resampling of trajectories"});
}

} // namespace

PotentialSpec potential_of(const RunConfig& cfg) {
    if (cfg.potential == "free") return PotentialSpec::free(cfg.params);
    if (cfg.potential == "exact") return PotentialSpec::exact(cfg.params);
    return PotentialSpec::truncated(cfg.params);
}

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    Context c(cfg, log);
    fs::create_directories(cfg.output);
    log << "experiment " << cfg.experiment << ", config digest " << hex64(c.digest) << "\n";
    const std::string& e = cfg.experiment;
    if (e == "evolve-quantum") run_evolve_quantum(c);
    else if (e == "evolve-classical") run_evolve_classical(c);
    else if (e == "equivalence") run_equivalence(c);
    else if (e == "gaussian") run_gaussian(c);
    else if (e == "witness-wigner") run_witness_wigner(c);
    else if (e == "witness-weyl") run_witness_weyl(c);
    else if (e == "sample") run_sample(c);
    else if (e == "moments") run_moments(c);
    else run_ensemble(c);
    return c.outcome;
}

} // namespace gravphase
