#include "tclab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tclab/csv.hpp"
#include "tclab/errors.hpp"
#include "tclab/fokkerplanck.hpp"
#include "tclab/sha1.hpp"
#include "tclab/stats.hpp"
#include "tclab/version.hpp"
#include "tclab/worker_pool.hpp"

namespace tclab {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Independent counter-stream namespaces per pipeline.
constexpr std::uint64_t kStreamDomainShift = 40;
enum StreamDomain : std::uint64_t { kMainEnsemble = 0, kEulerMaruyama = 1, kRegularity = 2, kSpacetime = 3 };

std::uint64_t stream_offset(std::uint64_t domain) { return domain << kStreamDomainShift; }

std::vector<double> refine_grid(const std::vector<double>& tgrid, int factor) {
    if (factor <= 1) return tgrid;
    std::vector<double> fine{tgrid.front()};
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        for (int j = 1; j < factor; ++j)
            fine.push_back(tgrid[k - 1] + (tgrid[k] - tgrid[k - 1]) * j / factor);
        fine.push_back(tgrid[k]);
    }
    return fine;
}

struct RunContext {
    const Scenario& sc;
    CoefficientModel model;
    std::string out_dir;
    const RunOptions& opts;
    SimulateOptions sim;
    std::optional<MarginalEnsemble> main_ensemble;
    bool ensemble_written = false;
    std::vector<std::string> shared_artifacts;

    RunContext(const Scenario& s, std::string out, const RunOptions& o)
        : sc(s), model(s.coefficient.build()), out_dir(std::move(out)), opts(o) {
        sim.mesh = sc.monte_carlo.mesh;
        sim.solver_tol = sc.tolerances.solver_tol;
        sim.snap_eps = sc.tolerances.snap_eps;
        sim.horizon_factor = sc.monte_carlo.horizon_factor;
        sim.workers = opts.workers;
        sim.quad.divergence_threshold = sc.tolerances.divergence_threshold;
        sim.quad.cauchy_tol = sc.tolerances.cauchy_tol;
        sim.quad.exponent_margin = sc.tolerances.exponent_margin;
    }

    std::string artifact(const std::string& name) const { return out_dir + "/" + name; }

    const MarginalEnsemble& ensemble() {
        if (!main_ensemble) {
            if (opts.import_ensemble) {
                MarginalEnsemble imported = read_ensemble_csv(*opts.import_ensemble);
                if (imported.tgrid.size() != sc.tgrid.size())
                    throw ConfigError("imported ensemble grid does not match the scenario tgrid");
                for (std::size_t k = 0; k < sc.tgrid.size(); ++k) {
                    if (std::fabs(imported.tgrid[k] - sc.tgrid[k]) > 1e-12)
                        throw ConfigError("imported ensemble grid does not match the scenario tgrid");
                }
                main_ensemble = std::move(imported);
            } else {
                main_ensemble = simulate_marginals(sc.process, model, sc.monte_carlo.paths, sc.tgrid,
                                                   sc.monte_carlo.master_seed, sim);
            }
        }
        return *main_ensemble;
    }

    void write_ensemble_artifacts() {
        if (ensemble_written || opts.import_ensemble) return;
        const auto& ens = ensemble();
        write_ensemble_csv(ens, artifact("ensemble.csv"));
        shared_artifacts.push_back("ensemble.csv");
        const PathBundle bundle =
            simulate_bundle(sc.process, model, sc.tgrid, sc.monte_carlo.master_seed, 0, sim);
        write_timechange_csv(bundle.tc, artifact("tau0.csv"));
        shared_artifacts.push_back("tau0.csv");
        for (int i = 0; i < opts.dump_paths; ++i) {
            const PathBundle b = simulate_bundle(sc.process, model, sc.tgrid,
                                                 sc.monte_carlo.master_seed,
                                                 static_cast<std::uint64_t>(i), sim);
            const std::string name = "path_" + std::to_string(i) + ".csv";
            write_path_csv(b.base, artifact(name));
            shared_artifacts.push_back(name);
        }
        ensemble_written = true;
    }
};

CheckResult check_classify(RunContext& ctx) {
    CheckResult result;
    result.kind = CheckKind::Classify;
    if (ctx.model.declared_zero_free()) {
        result.verdict = Verdict::Skipped;
        result.detail = "coefficient declared zero-free";
        return result;
    }
    std::vector<ClassificationRow> rows;
    std::size_t contradictions = 0;
    std::size_t inconclusive = 0;
    QuadratureSettings quad = ctx.sim.quad;
    for (const auto& zp : ctx.model.zeros()) {
        const auto declared = classify_zero(ctx.model, zp.location, 0.5, quad);
        rows.push_back({zp.location, "declared", to_string(declared.verdict), declared.evidence});
        QuadratureSettings forced = quad;
        forced.force_quadrature = true;
        const auto numeric = classify_zero(ctx.model, zp.location, 0.5, forced);
        rows.push_back({zp.location, "quadrature", to_string(numeric.verdict), numeric.evidence});
        if (numeric.verdict == ZeroVerdict::Inconclusive) {
            ++inconclusive;
        } else if (numeric.verdict != declared.verdict) {
            ++contradictions;
        }
    }
    write_classification_csv(rows, ctx.artifact("classification.csv"));
    result.artifacts.push_back("classification.csv");
    if (contradictions > 0) {
        result.verdict = Verdict::Fail;
        result.detail = std::to_string(contradictions) + " route contradiction(s)";
    } else if (inconclusive == ctx.model.zeros().size()) {
        result.verdict = Verdict::Inconclusive;
        result.detail = "every quadrature verdict inconclusive";
    } else {
        result.verdict = Verdict::Pass;
        result.detail = inconclusive > 0 ? "routes agree (" + std::to_string(inconclusive) +
                                               " quadrature verdict(s) inconclusive)"
                                         : "routes agree";
    }
    return result;
}

CheckResult check_regularity(RunContext& ctx) {
    CheckResult result;
    result.kind = CheckKind::Regularity;
    const std::size_t n = std::min<std::size_t>(ctx.sc.monte_carlo.paths, ctx.opts.per_path_cap);
    const double t_last = ctx.sc.tgrid.back();
    const double sigma0 = ctx.model.sigma(0.0, ctx.sc.process.initial_state());
    const double mesh = ctx.sc.monte_carlo.mesh;
    const double horizon =
        std::ceil(ctx.sim.horizon_factor * t_last * std::max(1.0, sigma0) / mesh) * mesh;

    std::vector<RcllPath> paths;
    paths.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(ctx.sc.monte_carlo.master_seed, stream_offset(kRegularity) + i);
        paths.push_back(sample_path(ctx.sc.process, horizon, mesh, rng));
    }
    const auto records = regularity_probe(ctx.model, paths, ctx.sim.quad);

    std::vector<RegularityRow> rows;
    std::size_t consistent = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        rows.push_back({i, records[i].rho0, records[i].rho, records[i].consistent});
        if (records[i].consistent) ++consistent;
    }
    write_regularity_csv(rows, ctx.artifact("regularity.csv"));
    result.artifacts.push_back("regularity.csv");
    const double frac = static_cast<double>(consistent) / static_cast<double>(n);
    result.detail = "consistent fraction " + format_double(frac);
    result.verdict =
        frac >= ctx.sc.tolerances.regularity_consistent_frac ? Verdict::Pass : Verdict::Fail;
    return result;
}

CheckResult check_fp(RunContext& ctx) {
    CheckResult result;
    result.kind = CheckKind::Fp;
    ctx.write_ensemble_artifacts();
    FpOptions opts;
    opts.sigma_multiplier = ctx.sc.tolerances.sigma_multiplier;
    const FpReport report = fp_residual(ctx.ensemble(), ctx.sc.process, ctx.model, ctx.sc.dictionary, opts);
    write_fp_csv(report, ctx.artifact("fp_residual.csv"));
    result.artifacts.push_back("fp_residual.csv");
    std::size_t failing = 0;
    for (const auto& c : report.cells) {
        if (!c.pass) ++failing;
    }
    result.verdict = report.all_pass ? Verdict::Pass : Verdict::Fail;
    result.detail = report.all_pass ? std::to_string(report.cells.size()) + " (function, t) cells within tolerance"
                                    : std::to_string(failing) + " cell(s) out of tolerance";
    return result;
}

CheckResult check_martingale(RunContext& ctx) {
    CheckResult result;
    result.kind = CheckKind::Martingale;
    const auto& sc = ctx.sc;
    const auto& tgrid = sc.tgrid;
    const std::size_t n = sc.monte_carlo.paths;
    const std::size_t n_grid = tgrid.size();
    const std::size_t n_fn = sc.dictionary.size();
    const auto subgrid = refine_grid(tgrid, sc.tolerances.subgrid_factor);
    std::vector<std::size_t> grid_pos;
    for (std::size_t k = 0, j = 0; k < n_grid; ++k) {
        while (std::fabs(subgrid[j] - tgrid[k]) > 1e-12) ++j;
        grid_pos.push_back(j);
    }

    // residual value per (kind, function, grid time, path)
    std::vector<std::vector<double>> hom(n_fn * n_grid, std::vector<double>(n));
    std::vector<std::vector<double>> inhom(n_fn * n_grid, std::vector<double>(n));

    parallel_for(n, ctx.opts.workers, [&](std::size_t i) {
        const PathBundle bundle =
            simulate_bundle(sc.process, ctx.model, subgrid, sc.monte_carlo.master_seed, i, ctx.sim);
        std::vector<double> base_vals(subgrid.size()), x_vals(subgrid.size());
        for (std::size_t j = 0; j < subgrid.size(); ++j) {
            base_vals[j] = bundle.base.evaluate_snapped(subgrid[j], sc.tolerances.snap_eps);
            x_vals[j] = bundle.x.evaluate_snapped(subgrid[j], sc.tolerances.snap_eps);
        }
        for (std::size_t fi = 0; fi < n_fn; ++fi) {
            const auto& f = sc.dictionary[fi];
            double hom_integral = 0.0, inhom_integral = 0.0;
            double hom_prev = 0.0, inhom_prev = 0.0;
            const double f_base0 = f.value(base_vals[0]);
            const double f_x0 = f.value(x_vals[0]);
            std::size_t next_k = 0;
            for (std::size_t j = 0; j < subgrid.size(); ++j) {
                const double s = subgrid[j];
                const double hom_cur = apply_generator(sc.process, f, base_vals[j]);
                const double inhom_cur =
                    ctx.model.sigma(s, x_vals[j]) * apply_generator(sc.process, f, x_vals[j]);
                if (j > 0) {
                    const double h = subgrid[j] - subgrid[j - 1];
                    hom_integral += 0.5 * (hom_cur + hom_prev) * h;
                    inhom_integral += 0.5 * (inhom_cur + inhom_prev) * h;
                }
                hom_prev = hom_cur;
                inhom_prev = inhom_cur;
                if (next_k < n_grid && grid_pos[next_k] == j) {
                    hom[fi * n_grid + next_k][i] = f.value(base_vals[j]) - f_base0 - hom_integral;
                    inhom[fi * n_grid + next_k][i] = f.value(x_vals[j]) - f_x0 - inhom_integral;
                    ++next_k;
                }
            }
        }
    });

    std::vector<MartingaleRow> rows;
    bool all_pass = true;
    for (int kind = 0; kind < 2; ++kind) {
        const auto& mat = (kind == 0) ? hom : inhom;
        for (std::size_t fi = 0; fi < n_fn; ++fi) {
            for (std::size_t k = 0; k < n_grid; ++k) {
                const auto stats = summary_stats(mat[fi * n_grid + k]);
                const bool pass =
                    std::fabs(stats.mean) <= sc.tolerances.sigma_multiplier * stats.standard_error;
                all_pass = all_pass && pass;
                rows.push_back({kind == 0 ? "homogeneous" : "inhomogeneous",
                                sc.dictionary[fi].label(), tgrid[k], stats.mean,
                                stats.standard_error, pass});
            }
        }
    }
    write_martingale_csv(rows, ctx.artifact("martingale.csv"));
    result.artifacts.push_back("martingale.csv");
    result.verdict = all_pass ? Verdict::Pass : Verdict::Fail;
    result.detail = all_pass ? "all residual means within tolerance" : "residual mean out of tolerance";
    return result;
}

CheckResult check_spacetime(RunContext& ctx) {
    CheckResult result;
    result.kind = CheckKind::Spacetime;
    const auto& sc = ctx.sc;
    const CutoffFunction& g = *sc.spacetime.cutoff;
    std::vector<SpacetimeRow> rows;
    bool all_pass = true;

    for (std::size_t s0_idx = 0; s0_idx < sc.spacetime.s0_values.size(); ++s0_idx) {
        const double s0 = sc.spacetime.s0_values[s0_idx];
        const CoefficientModel shifted = ctx.model.shifted(s0);
        const double t0 = sc.coefficient.t0;
        const double window_end = (s0 < t0) ? std::min(sc.tgrid.back(), t0 - s0) : sc.tgrid.back();
        std::vector<double> report_grid(sc.tgrid.size());
        for (std::size_t k = 0; k < sc.tgrid.size(); ++k)
            report_grid[k] = window_end * static_cast<double>(k) / static_cast<double>(sc.tgrid.size() - 1);
        report_grid[0] = 0.0;
        const auto fine_grid = refine_grid(report_grid, sc.tolerances.subgrid_factor);

        SimulateOptions sim = ctx.sim;
        const MarginalEnsemble ens =
            simulate_marginals(sc.process, shifted, sc.monte_carlo.paths, fine_grid,
                               sc.monte_carlo.master_seed + stream_offset(kSpacetime + s0_idx), sim);
        for (const auto& f : sc.dictionary) {
            const SpacetimeResidual res =
                spacetime_martingale_residual(ens, s0, sc.process, ctx.model, f, g, report_grid, 1);
            for (const auto& stat : res.stats) {
                const bool pass =
                    std::fabs(stat.mean) <= sc.tolerances.sigma_multiplier * stat.standard_error;
                all_pass = all_pass && pass;
                rows.push_back({s0, f.label(), stat.t, stat.mean, stat.standard_error, pass});
            }
        }
    }
    write_spacetime_csv(rows, ctx.artifact("spacetime.csv"));
    result.artifacts.push_back("spacetime.csv");
    result.verdict = all_pass ? Verdict::Pass : Verdict::Fail;
    result.detail = all_pass ? "all lifted residual means within tolerance"
                             : "lifted residual mean out of tolerance";
    return result;
}

CheckResult check_pathwise(RunContext& ctx) {
    CheckResult result;
    result.kind = CheckKind::Pathwise;
    const auto& sc = ctx.sc;
    const std::size_t n = std::min<std::size_t>(sc.monte_carlo.paths, ctx.opts.per_path_cap);
    std::vector<PathwiseRow> rows(n);
    FixedPointOptions fp_opts;
    fp_opts.subgrid_factor = sc.tolerances.subgrid_factor;
    fp_opts.snap_eps = sc.tolerances.snap_eps;
    fp_opts.discrete_state = sc.process.is_discrete_state();

    SimulateOptions fine_sim = ctx.sim;
    fine_sim.mesh = ctx.sim.mesh / 4.0;

    parallel_for(n, ctx.opts.workers, [&](std::size_t i) {
        const PathBundle coarse =
            simulate_bundle(sc.process, ctx.model, sc.tgrid, sc.monte_carlo.master_seed, i, ctx.sim);
        const PathBundle fine =
            simulate_bundle(sc.process, ctx.model, sc.tgrid, sc.monte_carlo.master_seed, i, fine_sim);
        const auto r_coarse = fixed_point_residual(coarse.base, coarse.x, ctx.model, sc.tgrid, fp_opts);
        const auto r_fine = fixed_point_residual(fine.base, fine.x, ctx.model, sc.tgrid, fp_opts);
        const bool pass =
            r_coarse.sup <= 2.0 * r_fine.sup + sc.tolerances.refinement_slack;
        rows[i] = {i, r_coarse.sup, r_fine.sup, coarse.tc.frozen_from.has_value(), pass};
    });

    bool all_pass = true;
    double worst = 0.0;
    for (const auto& r : rows) {
        all_pass = all_pass && r.pass;
        worst = std::max(worst, r.residual);
    }
    write_pathwise_csv(rows, ctx.artifact("pathwise.csv"));
    result.artifacts.push_back("pathwise.csv");
    result.verdict = all_pass ? Verdict::Pass : Verdict::Fail;
    result.detail = "max residual " + format_double(worst) + " over " + std::to_string(n) + " paths";
    return result;
}

CheckResult check_uniqueness(RunContext& ctx) {
    CheckResult result;
    result.kind = CheckKind::Uniqueness;
    const auto& sc = ctx.sc;
    if (!sc.process.is_brownian()) {
        result.verdict = Verdict::Skipped;
        result.detail = "independent Euler-Maruyama pipeline needs a Brownian base";
        return result;
    }
    ctx.write_ensemble_artifacts();
    const double spacing = sc.tgrid[1] - sc.tgrid[0];
    EulerMaruyamaOptions em;
    em.step = sc.monte_carlo.em_step.value_or(std::min(spacing / 8.0, 0.005));
    em.workers = ctx.opts.workers;
    const MarginalEnsemble em_ens = euler_maruyama_marginals(
        ctx.model, sc.process.initial_state(), sc.monte_carlo.paths, sc.tgrid,
        sc.monte_carlo.master_seed + stream_offset(kEulerMaruyama), em);
    const KsReport report = uniqueness_crosscheck(ctx.ensemble(), em_ens, sc.tolerances.ks_alpha);
    write_ks_csv(report, ctx.artifact("uniqueness_ks.csv"));
    result.artifacts.push_back("uniqueness_ks.csv");
    double worst = 0.0;
    for (const auto& c : report.cells) worst = std::max(worst, c.ks_statistic / c.threshold);
    result.verdict = report.all_pass ? Verdict::Pass : Verdict::Fail;
    result.detail = "max KS/threshold ratio " + format_double(worst);
    return result;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
        default: return "skipped";
    }
}

bool RunReport::any_fail() const {
    for (const auto& c : checks) {
        if (c.verdict == Verdict::Fail) return true;
    }
    return false;
}

nlohmann::ordered_json RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = kConfigSchemaVersion;
    j["version"] = version;
    j["name"] = scenario_name;
    j["scenario_hash"] = scenario_hash;
    j["master_seed"] = master_seed;
    nlohmann::ordered_json checks_json;
    for (const auto& c : checks) {
        nlohmann::ordered_json cj;
        cj["verdict"] = to_string(c.verdict);
        cj["detail"] = c.detail;
        cj["artifacts"] = c.artifacts;
        checks_json[to_string(c.kind)] = cj;
    }
    j["checks"] = checks_json;
    j["artifacts"] = artifacts;
    nlohmann::ordered_json timings;
    timings["workers"] = workers;
    timings["total_ms"] = total_ms;
    for (const auto& c : checks) timings[to_string(c.kind)] = c.wall_ms;
    j["timings"] = timings;
    return j;
}

RunReport run_scenario(const Scenario& scenario, const std::string& out_dir, const RunOptions& opts) {
    const auto t_start = Clock::now();
    fs::create_directories(out_dir);
    RunContext ctx(scenario, out_dir, opts);

    RunReport report;
    report.scenario_name = scenario.name;
    report.scenario_hash = Sha1::git_blob_hash(scenario.raw_text.empty()
                                                   ? scenario.echo.dump(2)
                                                   : scenario.raw_text);
    report.version = kVersion;
    report.master_seed = scenario.monte_carlo.master_seed;
    report.workers = opts.workers;

    std::vector<CheckKind> checks = opts.check_override.value_or(scenario.checks);
    // Dependency order: coefficient-only checks first, then the simulating ones.
    std::stable_sort(checks.begin(), checks.end(), [](CheckKind a, CheckKind b) {
        const auto rank = [](CheckKind k) {
            switch (k) {
                case CheckKind::Classify: return 0;
                case CheckKind::Regularity: return 1;
                default: return 2;
            }
        };
        return rank(a) < rank(b);
    });

    if (opts.force_simulate) ctx.write_ensemble_artifacts();

    for (CheckKind kind : checks) {
        const auto t_check = Clock::now();
        CheckResult result;
        switch (kind) {
            case CheckKind::Classify: result = check_classify(ctx); break;
            case CheckKind::Regularity: result = check_regularity(ctx); break;
            case CheckKind::Fp: result = check_fp(ctx); break;
            case CheckKind::Martingale: result = check_martingale(ctx); break;
            case CheckKind::Spacetime: result = check_spacetime(ctx); break;
            case CheckKind::Pathwise: result = check_pathwise(ctx); break;
            case CheckKind::Uniqueness: result = check_uniqueness(ctx); break;
        }
        result.kind = kind;
        result.wall_ms = ms_since(t_check);
        report.checks.push_back(std::move(result));
    }

    report.artifacts = ctx.shared_artifacts;
    report.total_ms = ms_since(t_start);
    std::ofstream out(out_dir + "/report.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + out_dir + "/report.json");
    out << report.to_json().dump(2) << '\n';
    return report;
}

}  // namespace tclab
