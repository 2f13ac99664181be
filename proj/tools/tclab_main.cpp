// Command-line front end: scenario configs in, CSV artifacts and a JSON
// report out. Exit code 0 iff no requested check failed.

#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tclab/errors.hpp"
#include "tclab/run.hpp"
#include "tclab/scenario.hpp"
#include "tclab/version.hpp"
#include "tclab/worker_pool.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string tol_overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "scenario config file (JSON)")->required();
    cmd->add_option("--out", args.out, "output directory (default out/<scenario name>)");
    cmd->add_option("--seed", args.seed, "override the master seed");
    cmd->add_option("--workers", args.workers, "worker threads (default: TCLAB_WORKERS or hardware)");
    cmd->add_option("--tol", args.tol_overrides, "tolerance overrides, key=value[,key=value...]");
}

int execute(const CommonArgs& args, const tclab::RunOptions& run_opts_in,
            const std::optional<std::vector<tclab::CheckKind>>& override_checks) {
    tclab::Scenario scenario = tclab::load_scenario_file(args.config);
    if (args.seed) scenario.monte_carlo.master_seed = *args.seed;
    tclab::apply_tolerance_overrides(scenario.tolerances, args.tol_overrides);

    tclab::RunOptions run_opts = run_opts_in;
    run_opts.workers = args.workers > 0 ? args.workers : tclab::default_worker_count();
    if (override_checks) run_opts.check_override = override_checks;

    const std::string out_dir = args.out.empty() ? "out/" + scenario.name : args.out;
    const tclab::RunReport report = tclab::run_scenario(scenario, out_dir, run_opts);

    for (const auto& check : report.checks) {
        std::printf("%-12s %-12s %s\n", tclab::to_string(check.kind), tclab::to_string(check.verdict),
                    check.detail.c_str());
    }
    std::printf("report: %s/report.json\n", out_dir.c_str());
    return report.any_fail() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-changed Markov process simulation laboratory"};
    app.set_version_flag("--version", std::string(tclab::kVersion));
    app.require_subcommand(1);

    CommonArgs args;
    tclab::RunOptions base_opts;

    auto* run = app.add_subcommand("run", "run every check requested by the scenario");
    add_common(run, args);

    auto* simulate = app.add_subcommand("simulate", "simulate the ensemble and export artifacts");
    add_common(simulate, args);
    int dump_paths = 0;
    simulate->add_option("--dump-paths", dump_paths, "also export the first k base paths");

    auto* classify = app.add_subcommand("classify", "classify the declared zeros of H");
    add_common(classify, args);

    auto* check_fp = app.add_subcommand("check-fp", "weak Fokker-Planck residual check");
    add_common(check_fp, args);
    std::string import_file;
    check_fp->add_option("--import", import_file, "use an exported ensemble CSV instead of simulating");

    auto* check_mart = app.add_subcommand("check-martingale", "martingale residual checks");
    add_common(check_mart, args);
    auto* check_st = app.add_subcommand("check-spacetime", "space-time lifted martingale check");
    add_common(check_st, args);
    auto* check_pw = app.add_subcommand("check-pathwise", "pathwise fixed-point residual check");
    add_common(check_pw, args);
    auto* check_uq = app.add_subcommand("check-uniqueness", "two-pipeline distribution cross-check");
    add_common(check_uq, args);

    CLI11_PARSE(app, argc, argv);

    try {
        using CK = tclab::CheckKind;
        if (run->parsed()) return execute(args, base_opts, std::nullopt);
        if (simulate->parsed()) {
            tclab::RunOptions opts = base_opts;
            opts.force_simulate = true;
            opts.dump_paths = dump_paths;
            return execute(args, opts, std::vector<CK>{});
        }
        if (classify->parsed()) return execute(args, base_opts, std::vector<CK>{CK::Classify});
        if (check_fp->parsed()) {
            tclab::RunOptions opts = base_opts;
            if (!import_file.empty()) opts.import_ensemble = import_file;
            return execute(args, opts, std::vector<CK>{CK::Fp});
        }
        if (check_mart->parsed()) return execute(args, base_opts, std::vector<CK>{CK::Martingale});
        if (check_st->parsed()) return execute(args, base_opts, std::vector<CK>{CK::Spacetime});
        if (check_pw->parsed()) return execute(args, base_opts, std::vector<CK>{CK::Pathwise});
        if (check_uq->parsed()) return execute(args, base_opts, std::vector<CK>{CK::Uniqueness});
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
