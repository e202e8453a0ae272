#include <CLI11.hpp>
#include <iostream>

#include "ncmap/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ncmap: derivative-free optimization by periodic exploration maps"};
    app.require_subcommand(1);

    ncmap::CommandOptions opts;
    std::string suite;
    int m_max = 200;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "config file (dotted key=value lines)");
        sub->add_option("--preset", opts.preset, "shipped preset id (1, 1e, 2, 2f, 3, 4, 5)");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "noise seed");
        sub->add_option("--sigma", opts.sigma, "free singular values, comma separated");
    };

    auto* construct = app.add_subcommand("construct", "build W and write it to OUT/W.txt");
    auto* run = app.add_subcommand("run", "construct W and iterate, writing OUT/run.csv");
    auto* simulate = app.add_subcommand("simulate", "run a preset and write plot data");
    auto* verify = app.add_subcommand("verify", "numerical certification suites");
    for (auto* sub : {construct, run, simulate, verify}) add_common(sub);
    verify->add_option("suite", suite, "order | shoelace | brockett | catalog | interlacing")
        ->required()
        ->check(CLI::IsMember({"order", "shoelace", "brockett", "catalog", "interlacing"}));
    verify->add_option("--m-max", m_max, "interlacing scan bound")->check(CLI::Range(2, 100000));
    for (auto* sub : {construct, run, simulate, verify}) {
        sub->add_option("overrides", opts.overrides, "key=value overrides");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    return ncmap::guarded(
        [&] {
            ncmap::RunConfig cfg = ncmap::resolve_config(opts);
            if (*construct) return ncmap::cmd_construct(cfg, std::cout);
            if (*run) return ncmap::cmd_run(cfg, std::cout);
            if (*simulate) {
                if (!opts.preset && !opts.config_path) {
                    throw ncmap::Error(ncmap::ErrorKind::ConfigError, "simulate needs --preset or --config");
                }
                return ncmap::cmd_simulate(cfg, std::cout);
            }
            return ncmap::cmd_verify(suite, cfg, m_max, std::cout);
        },
        std::cerr);
}
