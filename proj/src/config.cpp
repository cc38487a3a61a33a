#include "gravphase/config.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "gravphase/errors.hpp"

namespace gravphase {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
    return x;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    const long long x = to_int(key, v);
    if (x < 0) throw ConfigError("key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

EnsembleConfig& ensemble_of(RunConfig& c) {
    if (!c.ensemble) c.ensemble = EnsembleConfig{};
    return *c.ensemble;
}

WitnessConfig& witness_of(RunConfig& c) {
    if (!c.witness) c.witness = WitnessConfig{};
    return *c.witness;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"experiment", [](RunConfig& c, const std::string&, const std::string& v) { c.experiment = v; }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_count(k, v); }},
        {"potential", [](RunConfig& c, const std::string&, const std::string& v) { c.potential = v; }},
        {"params.m", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.m = to_double(k, v); }},
        {"params.L", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.L = to_double(k, v); }},
        {"params.sigma", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.sigma = to_double(k, v); }},
        {"params.pbar", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.pbar = to_double(k, v); }},
        {"params.G", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.G = to_double(k, v); }},
        {"params.hbar", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.hbar = to_double(k, v); }},
        {"params.N", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.N = static_cast<int>(to_int(k, v)); }},
        {"params.theta", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.theta = to_double(k, v); }},
        {"grid.n_wave", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_wave = to_count(k, v); }},
        {"grid.wave_n_sigma", [](RunConfig& c, const std::string& k, const std::string& v) { c.wave_n_sigma = to_double(k, v); }},
        {"grid.n_r", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_r = to_count(k, v); }},
        {"grid.n_p", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_p = to_count(k, v); }},
        {"grid.n_sigma", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_sigma = to_double(k, v); }},
        {"times.checkpoints", [](RunConfig& c, const std::string& k, const std::string& v) { c.checkpoints = to_list(k, v); }},
        {"times.linspace",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const auto l = to_list(k, v);
             if (l.size() != 3 || l[2] < 1 || l[2] != std::floor(l[2]))
                 throw ConfigError("times.linspace needs 'start, stop, count'");
             const auto n = static_cast<std::size_t>(l[2]);
             c.checkpoints.clear();
             for (std::size_t i = 0; i < n; ++i)
                 c.checkpoints.push_back(n == 1 ? l[1] : l[0] + (l[1] - l[0]) * static_cast<double>(i) / static_cast<double>(n - 1));
         }},
        {"times.dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt = to_double(k, v); }},
        {"witness.delta", [](RunConfig& c, const std::string& k, const std::string& v) { witness_of(c).delta = to_double(k, v); }},
        {"witness.center",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             auto& w = witness_of(c);
             if (v == "auto") {
                 c.witness_auto_center = true;
                 return;
             }
             const auto l = to_list(k, v);
             if (l.size() != 2) throw ConfigError("witness.center needs 'auto' or 'r, p'");
             c.witness_auto_center = false;
             w.center_r = l[0];
             w.center_p = l[1];
         }},
        {"gaussian.n1", [](RunConfig& c, const std::string& k, const std::string& v) { c.gaussian_n1 = static_cast<int>(to_int(k, v)); }},
        {"gaussian.n2", [](RunConfig& c, const std::string& k, const std::string& v) { c.gaussian_n2 = static_cast<int>(to_int(k, v)); }},
        {"weyl.dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.weyl_dim = to_count(k, v); }},
        {"weyl.frame", [](RunConfig& c, const std::string&, const std::string& v) { c.weyl_frame = v; }},
        {"sample.count", [](RunConfig& c, const std::string& k, const std::string& v) { c.sample_count = to_count(k, v); }},
        {"sample.angles", [](RunConfig& c, const std::string& k, const std::string& v) { c.sample_angles = to_count(k, v); }},
        {"sample.nx", [](RunConfig& c, const std::string& k, const std::string& v) { c.sample_nx = to_count(k, v); }},
        {"sample.export", [](RunConfig& c, const std::string& k, const std::string& v) { c.sample_export = to_bool(k, v); }},
        {"ensemble.n_traj", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).n_traj = to_count(k, v); }},
        {"ensemble.order", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).order = static_cast<int>(to_int(k, v)); }},
        {"ensemble.t_final", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).t_final = to_double(k, v); }},
        {"ensemble.dt", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).dt = to_double(k, v); }},
        {"ensemble.bootstrap", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).bootstrap = to_count(k, v); }},
        {"ensemble.sigma_x1", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[0].sigma_x = to_double(k, v); }},
        {"ensemble.sigma_y1", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[0].sigma_y = to_double(k, v); }},
        {"ensemble.sigma_x2", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[1].sigma_x = to_double(k, v); }},
        {"ensemble.sigma_y2", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[1].sigma_y = to_double(k, v); }},
        {"ensemble.px1", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[0].mean_px = to_double(k, v); }},
        {"ensemble.py1", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[0].mean_py = to_double(k, v); }},
        {"ensemble.px2", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[1].mean_px = to_double(k, v); }},
        {"ensemble.py2", [](RunConfig& c, const std::string& k, const std::string& v) { ensemble_of(c).particles[1].mean_py = to_double(k, v); }},
        {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output = v; }},
        {"output.snapshots", [](RunConfig& c, const std::string& k, const std::string& v) { c.snapshots = to_bool(k, v); }},
    };
    return table;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(cfg, key, value);
    }
    if (cfg.ensemble) cfg.ensemble->seed = cfg.seed;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void RunConfig::validate() const {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end())
        throw ConfigError("unknown experiment '" + experiment + "'");
    try {
        params.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (potential != "truncated" && potential != "exact" && potential != "free")
        throw ConfigError("potential must be truncated, exact or free");
    if (potential == "truncated" && params.N > 3) throw ConfigError("truncated potential supports N <= 3");
    if (weyl_frame != "interaction" && weyl_frame != "static") throw ConfigError("weyl.frame must be interaction or static");
    if (experiment == "ensemble-2d") {
        if (!ensemble) throw ConfigError("ensemble-2d needs ensemble.* settings");
        try {
            ensemble->validate(params);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        return;
    }
    if (checkpoints.empty()) throw ConfigError("empty checkpoint list");
    for (double t : checkpoints)
        if (!(t >= 0) || !std::isfinite(t)) throw ConfigError("checkpoints must be finite and >= 0");
    if (!(dt > 0)) throw ConfigError("times.dt must be positive");
    if (!is_power_of_two(n_wave) || n_wave < 64) throw ConfigError("grid.n_wave must be a power of two >= 64");
    if (!is_power_of_two(n_r) || !is_power_of_two(n_p) || n_r < 64 || n_p < 64)
        throw ConfigError("grid.n_r and grid.n_p must be powers of two >= 64");
    if ((experiment == "witness-wigner" || experiment == "sample") && !witness)
        throw ConfigError(experiment + " needs witness.* settings");
    if (witness) {
        try {
            witness->validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    if (experiment == "gaussian" && (gaussian_n1 < 0 || gaussian_n2 < 0)) throw ConfigError("Fock indices must be >= 0");
    if (experiment == "sample" && sample_count < 100) throw ConfigError("sample.count must be >= 100");
    if (weyl_dim < 3) throw ConfigError("weyl.dim must be >= 3");
}

std::string canonical_config(const RunConfig& c) {
    std::map<std::string, std::string> kv;
    auto num = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    kv["experiment"] = c.experiment;
    kv["seed"] = std::to_string(c.seed);
    kv["potential"] = c.potential;
    kv["params.m"] = num(c.params.m);
    kv["params.L"] = num(c.params.L);
    kv["params.sigma"] = num(c.params.sigma);
    kv["params.pbar"] = num(c.params.pbar);
    kv["params.G"] = num(c.params.G);
    kv["params.hbar"] = num(c.params.hbar);
    kv["params.N"] = std::to_string(c.params.N);
    kv["params.theta"] = num(c.params.theta);
    kv["grid.n_wave"] = std::to_string(c.n_wave);
    kv["grid.wave_n_sigma"] = num(c.wave_n_sigma);
    kv["grid.n_r"] = std::to_string(c.n_r);
    kv["grid.n_p"] = std::to_string(c.n_p);
    kv["grid.n_sigma"] = num(c.n_sigma);
    std::string times;
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i) times += (i ? ", " : "") + num(c.checkpoints[i]);
    kv["times.checkpoints"] = times;
    kv["times.dt"] = num(c.dt);
    if (c.witness) {
        kv["witness.delta"] = num(c.witness->delta);
        kv["witness.center"] = c.witness_auto_center ? "auto" : num(c.witness->center_r) + ", " + num(c.witness->center_p);
    }
    kv["gaussian.n1"] = std::to_string(c.gaussian_n1);
    kv["gaussian.n2"] = std::to_string(c.gaussian_n2);
    kv["weyl.dim"] = std::to_string(c.weyl_dim);
    kv["weyl.frame"] = c.weyl_frame;
    kv["sample.count"] = std::to_string(c.sample_count);
    kv["sample.angles"] = std::to_string(c.sample_angles);
    kv["sample.nx"] = std::to_string(c.sample_nx);
    kv["sample.export"] = c.sample_export ? "true" : "false";
    kv["output.snapshots"] = c.snapshots ? "true" : "false";
    if (c.ensemble) {
        const auto& e = *c.ensemble;
        kv["ensemble.n_traj"] = std::to_string(e.n_traj);
        kv["ensemble.order"] = std::to_string(e.order);
        kv["ensemble.t_final"] = num(e.t_final);
        kv["ensemble.dt"] = num(e.dt);
        kv["ensemble.bootstrap"] = std::to_string(e.bootstrap);
        for (int k = 0; k < 2; ++k) {
            const auto s = std::to_string(k + 1);
            kv["ensemble.sigma_x" + s] = num(e.particles[k].sigma_x);
            kv["ensemble.sigma_y" + s] = num(e.particles[k].sigma_y);
            kv["ensemble.px" + s] = num(e.particles[k].mean_px);
            kv["ensemble.py" + s] = num(e.particles[k].mean_py);
        }
    }
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_digest(const RunConfig& cfg) { return fnv1a64(canonical_config(cfg)); }

} // namespace gravphase
