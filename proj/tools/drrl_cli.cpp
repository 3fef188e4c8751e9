#include "drrl/harness.hpp"
#include "drrl/selftest.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    namespace h = drrl::harness;
    CLI::App app{"Distributionally robust RL toolkit"};
    app.require_subcommand(1);

    std::string config;
    h::RunOptions opt;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config, "experiment config (JSON)");
        if (config_required) c->required();
        sub->add_option("--out", opt.out_dir, "output directory (overrides output_dir)");
        sub->add_option("--jobs", opt.jobs, "parallel cells")->check(CLI::PositiveNumber);
        sub->add_option("--seed-offset", opt.seed_offset, "added to every configured seed");
    };

    auto* plan = app.add_subcommand("plan", "robust backward induction: V*, Q*, pi*, worst-case kernels");
    auto* cov = app.add_subcommand("coverability", "exact robust coverability and cumulative visitation");
    auto* rfl = app.add_subcommand("rfltv-exact", "finite-class RFL-TV with regret traces");
    auto* tr = app.add_subcommand("train", "train practical agents, then evaluate under perturbations");
    auto* ev = app.add_subcommand("eval", "evaluate saved agents under perturbations");
    for (auto* sub : {plan, cov, rfl, tr, ev}) add_common(sub, true);

    std::string run_dir;
    auto* rep = app.add_subcommand("report", "aggregate evaluation returns into summary and comparison tables");
    rep->add_option("run_dir", run_dir, "run directory")->required();
    rep->add_option("--out", opt.out_dir, "where to write summary.csv and comparison.csv");

    auto* self = app.add_subcommand("selftest", "property suites of all modules (or a dual_property_suite config)");
    add_common(self, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : h::kExitConfig;
    }

    if (rep->parsed()) return h::run_report(run_dir, opt.out_dir, std::cout);
    if (self->parsed() && config.empty()) return drrl::run_selftest(std::cout);

    for (auto* sub : app.get_subcommands())
        return h::run_command(sub->get_name(), config, opt, std::cout);
    return h::kExitFailure;
}
