// gravphase run <config> [--output DIR] [--threads N] [--seed S]
#include <iostream>

#include <omp.h>

#include "CLI11.hpp"
#include "gravphase/config.hpp"
#include "gravphase/errors.hpp"
#include "gravphase/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Phase-space simulator for two gravitationally interacting masses"};
    app.require_subcommand(1);
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
    std::string config_path, output;
    int threads = 0;
    long long seed = -1;
    run_cmd->add_option("config", config_path, "Config file (key = value)")->required();
    run_cmd->add_option("--output", output, "Output directory (overrides output.dir)");
    run_cmd->add_option("--threads", threads, "Worker thread cap")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--seed", seed, "RNG seed (overrides seed)")->check(CLI::NonNegativeNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    gravphase::RunConfig cfg;
    try {
        cfg = gravphase::load_config(config_path);
        if (!output.empty()) cfg.output = output;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (cfg.ensemble) cfg.ensemble->seed = cfg.seed;
        cfg.threads = threads;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: invalid configuration: " << e.what() << "\n";
        return 2;
    }
    if (threads > 0) omp_set_num_threads(threads);

    try {
        const auto outcome = gravphase::run(cfg, std::cerr);
        std::cerr << "wrote " << outcome.table.string() << "\n";
    } catch (const gravphase::ConfigError& e) {
        std::cerr << "error: invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const gravphase::InvalidArgument& e) {
        std::cerr << "error: invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: numerical abort: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
