#include <iostream>

#include <CLI11.hpp>

#include "hypobgk/experiment.hpp"

using namespace hypobgk;

int main(int argc, char** argv) {
    CLI::App app{"hypobgk: hypocoercive decay certificates for the linear BGK model with random collision frequency"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    double inflate = 1.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out_dir, "output directory (overrides HYPOBGK_OUT and the config)");
        sub->add_option("--seed", seed, "seed for random initial data");
        sub->add_option("-j,--threads", threads, "worker threads (sweep)")->check(CLI::PositiveNumber);
    };

    auto* certify = app.add_subcommand("certify", "compute alpha, mu, lambda and Ctilde");
    auto* verify = app.add_subcommand("verify", "check the per-mode matrix inequality on a sigma grid");
    auto* simulate = app.add_subcommand("simulate", "propagate and compare the entropy against its decay envelope");
    auto* derivs = app.add_subcommand("derivatives", "propagate z-derivative levels against their envelopes");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep over L, a sigma parameter and z");
    for (auto* s : {certify, verify, simulate, derivs, sweep}) add_common(s);
    verify->add_option("--inflate-mu", inflate, "multiply mu before checking (debug)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = load_config(config_path);
        CommandOptions opts;
        if (!out_dir.empty()) opts.out = out_dir;
        opts.threads = threads;
        for (auto* s : {certify, verify, simulate, derivs, sweep})
            if (s->parsed() && s->count("--seed")) opts.seed = seed;
        opts.mu_inflation = inflate;

        if (certify->parsed()) return cmd_certify(cfg, opts, std::cout);
        if (verify->parsed()) return cmd_verify(cfg, opts, std::cout);
        if (simulate->parsed()) return cmd_simulate(cfg, opts, std::cout);
        if (derivs->parsed()) return cmd_derivatives(cfg, opts, std::cout);
        return cmd_sweep(cfg, opts, std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
