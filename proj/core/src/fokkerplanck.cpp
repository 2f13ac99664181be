#include "tclab/fokkerplanck.hpp"

#include <algorithm>
#include <cmath>

#include "tclab/errors.hpp"
#include "tclab/stats.hpp"
#include "tclab/worker_pool.hpp"

namespace tclab {

namespace {

void validate_tgrid(const std::vector<double>& tgrid) {
    if (tgrid.empty()) throw InvalidArgument("tgrid is empty");
    if (tgrid.front() != 0.0) throw InvalidArgument("tgrid must start at 0");
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        if (!(tgrid[k] > tgrid[k - 1])) throw InvalidArgument("tgrid not increasing");
    }
}

double uniform_spacing(const std::vector<double>& tgrid) {
    if (tgrid.size() < 2) throw InvalidArgument("fp_residual: need at least two grid times");
    const double h = tgrid[1] - tgrid[0];
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        const double d = tgrid[k] - tgrid[k - 1];
        if (std::fabs(d - h) > 1e-9 * h) throw InvalidArgument("fp_residual: tgrid not uniform");
    }
    return h;
}

// Right-continuous step evaluation of one ensemble row.
double row_eval(const MarginalEnsemble& ens, std::size_t path, double s) {
    const auto& grid = ens.tgrid;
    auto it = std::upper_bound(grid.begin(), grid.end(), s);
    const std::size_t idx = static_cast<std::size_t>(it - grid.begin()) - 1;
    return ens.at(path, idx);
}

}  // namespace

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::TimeChange: return "timechange";
        case Provenance::EulerMaruyama: return "euler_maruyama";
        default: return "external";
    }
}

std::vector<double> MarginalEnsemble::column(std::size_t k) const {
    std::vector<double> out(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) out[i] = at(i, k);
    return out;
}

std::vector<double> MarginalEnsemble::sorted_column(std::size_t k) const {
    auto out = column(k);
    std::sort(out.begin(), out.end());
    return out;
}

PathBundle simulate_bundle(const ProcessSpec& spec, const CoefficientModel& model,
                           const std::vector<double>& tgrid, std::uint64_t master_seed,
                           std::uint64_t path_index, const SimulateOptions& opts) {
    validate_tgrid(tgrid);
    const double t_last = std::max(tgrid.back(), opts.mesh);
    const double sigma0 = model.sigma(0.0, spec.initial_state());
    double horizon = opts.horizon_factor * t_last * std::max(1.0, sigma0);

    TimeChangeSettings tcs;
    tcs.tol = opts.solver_tol;
    tcs.snap_eps = opts.snap_eps;
    tcs.quad = opts.quad;

    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
        // Whole mesh cells keep the sampling grid prefix-stable across retries.
        const double cells = std::ceil(horizon / opts.mesh - 1e-12);
        const double h = cells * opts.mesh;
        CounterRng rng(master_seed, path_index);
        RcllPath base = sample_path(spec, h, opts.mesh, rng);
        try {
            TimeChange tc = build_time_change(base, model, tgrid, tcs);
            RcllPath x = apply_time_change(base, tc);
            return PathBundle{std::move(base), std::move(tc), std::move(x)};
        } catch (const HorizonExhausted&) {
            horizon *= 2.0;
        }
    }
    throw InfeasibleScenario("simulate: path stream " + std::to_string(path_index) +
                             " (master seed " + std::to_string(master_seed) + ") exhausted " +
                             std::to_string(opts.max_retries) +
                             " horizon retries; the scenario looks non-recurrent");
}

MarginalEnsemble simulate_marginals(const ProcessSpec& spec, const CoefficientModel& model,
                                    std::size_t n_paths, const std::vector<double>& tgrid,
                                    std::uint64_t master_seed, const SimulateOptions& opts) {
    validate_tgrid(tgrid);
    if (n_paths == 0) throw InvalidArgument("simulate_marginals: need at least one path");

    MarginalEnsemble ens;
    ens.tgrid = tgrid;
    ens.n_paths = n_paths;
    ens.samples.resize(n_paths * tgrid.size());
    ens.master_seed = master_seed;
    ens.provenance = Provenance::TimeChange;
    ens.frozen_from.assign(n_paths, -1);

    parallel_for(n_paths, opts.workers, [&](std::size_t i) {
        const PathBundle bundle = simulate_bundle(spec, model, tgrid, master_seed, i, opts);
        for (std::size_t k = 0; k < tgrid.size(); ++k) ens.samples[i * tgrid.size() + k] = bundle.x.evaluate(tgrid[k]);
        if (bundle.tc.frozen_from) ens.frozen_from[i] = static_cast<std::int64_t>(*bundle.tc.frozen_from);
    });
    return ens;
}

FpReport fp_residual(const MarginalEnsemble& ens, const ProcessSpec& spec,
                     const CoefficientModel& model, const std::vector<TestFunction>& dictionary,
                     const FpOptions& opts) {
    if (dictionary.empty()) throw InvalidArgument("fp_residual: empty dictionary");
    if (ens.n_paths < 2) throw InvalidArgument("fp_residual: need at least two paths");
    const double h = uniform_spacing(ens.tgrid);
    const std::size_t n = ens.n_paths;
    const std::size_t T = ens.tgrid.size();

    FpReport report;
    for (const auto& f : dictionary) {
        std::vector<double> f0(n), integral(n, 0.0), y_prev(n), buffer(n);
        std::vector<double> lhs(T), se_lhs(T), rhs(T), se_rhs(T), g_mean(T);
        for (std::size_t i = 0; i < n; ++i) f0[i] = f.value(ens.at(i, 0));
        for (std::size_t k = 0; k < T; ++k) {
            const double t = ens.tgrid[k];
            // integrand samples at this grid time
            for (std::size_t i = 0; i < n; ++i) {
                const double x = ens.at(i, k);
                buffer[i] = model.sigma(t, x) * apply_generator(spec, f, x);
            }
            g_mean[k] = pairwise_sum(buffer) / static_cast<double>(n);
            if (k > 0) {
                for (std::size_t i = 0; i < n; ++i) integral[i] += 0.5 * (buffer[i] + y_prev[i]) * h;
            }
            std::swap(y_prev, buffer);
            const auto rhs_stats = summary_stats(integral);
            rhs[k] = rhs_stats.mean;
            se_rhs[k] = rhs_stats.standard_error;
            for (std::size_t i = 0; i < n; ++i) buffer[i] = f.value(ens.at(i, k)) - f0[i];
            const auto lhs_stats = summary_stats(buffer);
            lhs[k] = lhs_stats.mean;
            se_lhs[k] = lhs_stats.standard_error;
        }
        double d2_max = 0.0;
        for (std::size_t k = 1; k + 1 < T; ++k) {
            d2_max = std::max(d2_max, std::fabs(g_mean[k - 1] - 2.0 * g_mean[k] + g_mean[k + 1]) / (h * h));
        }
        for (std::size_t k = 0; k < T; ++k) {
            FpCell cell;
            cell.function = f.label();
            cell.t = ens.tgrid[k];
            cell.lhs = lhs[k];
            cell.rhs = rhs[k];
            cell.residual = lhs[k] - rhs[k];
            cell.mc_standard_error = se_lhs[k] + se_rhs[k];
            cell.quadrature_bound = (h * h / 12.0) * d2_max * ens.tgrid[k];
            cell.pass = std::fabs(cell.residual) <=
                        opts.sigma_multiplier * cell.mc_standard_error + cell.quadrature_bound;
            report.all_pass = report.all_pass && cell.pass;
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

double spacetime_operator(const TestFunction& f, const CutoffFunction& g, double t, double x,
                          const ProcessSpec& spec, const CoefficientModel& model) {
    return g.value(t) * model.sigma(t, x) * apply_generator(spec, f, x) +
           f.value(x) * g.derivative(t);
}

SpacetimeResidual spacetime_martingale_residual(const MarginalEnsemble& ens, double s0,
                                                const ProcessSpec& spec, const CoefficientModel& model,
                                                const TestFunction& f, const CutoffFunction& g,
                                                const std::vector<double>& report_times,
                                                int subgrid_factor) {
    if (ens.n_paths == 0) throw InvalidArgument("spacetime_martingale_residual: empty ensemble");
    const auto& grid = ens.tgrid;
    std::vector<std::size_t> report_cols;
    for (double t : report_times) {
        auto it = std::find_if(grid.begin(), grid.end(),
                               [t](double v) { return std::fabs(v - t) <= 1e-12; });
        if (it == grid.end())
            throw OutOfRange("spacetime_martingale_residual: report time " + std::to_string(t) +
                             " is not a grid time");
        report_cols.push_back(static_cast<std::size_t>(it - grid.begin()));
    }

    // Integration subgrid refines the ensemble grid.
    const int sub = std::max(1, subgrid_factor);
    std::vector<double> subgrid{grid.front()};
    std::vector<std::size_t> col_pos(grid.size(), 0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        for (int j = 1; j < sub; ++j)
            subgrid.push_back(grid[k - 1] + (grid[k] - grid[k - 1]) * j / sub);
        subgrid.push_back(grid[k]);
        col_pos[k] = subgrid.size() - 1;
    }

    std::vector<std::vector<double>> residuals(report_cols.size(), std::vector<double>(ens.n_paths));
    const double g_at_s0 = g.value(s0);
    for (std::size_t i = 0; i < ens.n_paths; ++i) {
        const double fx0 = f.value(ens.at(i, 0));
        double integral = 0.0;
        double prev_integrand = 0.0;
        std::size_t next_report = 0;
        for (std::size_t j = 0; j < subgrid.size(); ++j) {
            const double s = subgrid[j];
            const double x = row_eval(ens, i, s);
            const double lifted_t = s0 + s;
            const double integrand = g.value(lifted_t) * model.sigma(lifted_t, x) *
                                         apply_generator(spec, f, x) +
                                     f.value(x) * g.derivative(lifted_t);
            if (j > 0) integral += 0.5 * (integrand + prev_integrand) * (subgrid[j] - subgrid[j - 1]);
            prev_integrand = integrand;
            while (next_report < report_cols.size() && col_pos[report_cols[next_report]] == j) {
                const double t = grid[report_cols[next_report]];
                const double xt = ens.at(i, report_cols[next_report]);
                residuals[next_report][i] = g.value(s0 + t) * f.value(xt) - g_at_s0 * fx0 - integral;
                ++next_report;
            }
        }
    }

    SpacetimeResidual out;
    out.time_component_exact = true;  // the lifted time is s0 + t by construction
    out.stats.resize(report_cols.size());
    for (std::size_t r = 0; r < report_cols.size(); ++r) {
        out.stats[r].t = grid[report_cols[r]];
        if (ens.n_paths >= 2) {
            const auto stats = summary_stats(residuals[r]);
            out.stats[r].mean = stats.mean;
            out.stats[r].standard_error = stats.standard_error;
        } else {
            out.stats[r].mean = residuals[r][0];
        }
    }
    return out;
}

KsReport uniqueness_crosscheck(const MarginalEnsemble& a, const MarginalEnsemble& b, double alpha) {
    if (a.tgrid.size() != b.tgrid.size()) throw InvalidArgument("uniqueness_crosscheck: grid size mismatch");
    for (std::size_t k = 0; k < a.tgrid.size(); ++k) {
        if (std::fabs(a.tgrid[k] - b.tgrid[k]) > 1e-12)
            throw InvalidArgument("uniqueness_crosscheck: grids differ at index " + std::to_string(k));
    }
    KsReport report;
    for (std::size_t k = 0; k < a.tgrid.size(); ++k) {
        KsCell cell;
        cell.t = a.tgrid[k];
        const auto sa = a.sorted_column(k);
        const auto sb = b.sorted_column(k);
        cell.ks_statistic = ks_two_sample(sa, sb);
        cell.threshold = ks_threshold(alpha, sa.size(), sb.size());
        cell.pass = cell.ks_statistic < cell.threshold;
        report.all_pass = report.all_pass && cell.pass;
        report.cells.push_back(cell);
    }
    return report;
}

MarginalEnsemble euler_maruyama_marginals(const CoefficientModel& model, double x0,
                                          std::size_t n_paths, const std::vector<double>& tgrid,
                                          std::uint64_t master_seed,
                                          const EulerMaruyamaOptions& opts) {
    validate_tgrid(tgrid);
    if (n_paths == 0) throw InvalidArgument("euler_maruyama_marginals: need at least one path");
    if (!(opts.step > 0.0)) throw InvalidArgument("euler_maruyama_marginals: step must be positive");
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        if (opts.step > tgrid[k] - tgrid[k - 1] + 1e-15)
            throw InvalidArgument("euler_maruyama_marginals: step exceeds the grid spacing");
    }

    MarginalEnsemble ens;
    ens.tgrid = tgrid;
    ens.n_paths = n_paths;
    ens.samples.resize(n_paths * tgrid.size());
    ens.master_seed = master_seed;
    ens.provenance = Provenance::EulerMaruyama;

    parallel_for(n_paths, opts.workers, [&](std::size_t i) {
        CounterRng rng(master_seed, i);
        double x = x0;
        ens.samples[i * tgrid.size()] = x;
        for (std::size_t k = 1; k < tgrid.size(); ++k) {
            const double a = tgrid[k - 1];
            const double spacing = tgrid[k] - a;
            const auto n_sub = static_cast<std::size_t>(std::ceil(spacing / opts.step - 1e-12));
            const double h = spacing / static_cast<double>(n_sub);
            const double sqrt_h = std::sqrt(h);
            for (std::size_t j = 0; j < n_sub; ++j) {
                const double t = a + h * static_cast<double>(j);
                const double sigma = std::max(model.sigma(t, x), 0.0);
                x += std::sqrt(sigma) * sqrt_h * rng.next_gaussian();
            }
            ens.samples[i * tgrid.size() + k] = x;
        }
    });
    return ens;
}

}  // namespace tclab
