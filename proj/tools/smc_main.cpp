#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smcva/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string config_file;
    std::string out_dir = "run";
    std::string profile = "desk";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

smcva::RunConfig resolve_config(const CommonOpts& opts) {
    smcva::RunConfig cfg = smcva::RunConfig::profile(opts.profile);
    if (!opts.config_file.empty()) cfg.apply_file(opts.config_file);
    if (opts.seed_set) cfg.seed = opts.seed;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_file, "key = value config file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--profile", opts.profile, "desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", opts.seed, "master seed override")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twin-experiment pipeline: variational annealing plus "
                 "biased Metropolis-Hastings sampling on Lorenz96"};
    app.require_subcommand(1);

    CommonOpts opts;
    CLI::App* generate = app.add_subcommand(
        "generate", "simulate truth and noisy observations");
    CLI::App* anneal = app.add_subcommand(
        "anneal", "run the annealing sweep and pick bias endpoints");
    CLI::App* sample = app.add_subcommand(
        "sample", "run the walker ensemble and build the marginal");
    CLI::App* report =
        app.add_subcommand("report", "export plot-ready figure data");
    for (CLI::App* cmd : {generate, anneal, sample, report})
        add_common(cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            smcva::run_generate(resolve_config(opts), opts.out_dir);
        else if (anneal->parsed())
            smcva::run_anneal(resolve_config(opts), opts.out_dir);
        else if (sample->parsed())
            smcva::run_sample(resolve_config(opts), opts.out_dir);
        else if (report->parsed())
            smcva::run_report(opts.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
