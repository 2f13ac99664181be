#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tclab/coefficients.hpp"
#include "tclab/generators.hpp"
#include "tclab/process.hpp"
#include "tclab/timechange.hpp"

namespace tclab {

enum class Provenance { TimeChange, EulerMaruyama, External };

const char* to_string(Provenance p);

// Per-time-point samples of X across Monte Carlo paths; row i holds path i
// evaluated on tgrid.
struct MarginalEnsemble {
    std::vector<double> tgrid;
    std::size_t n_paths = 0;
    std::vector<double> samples;  // row-major, n_paths x tgrid.size()
    std::uint64_t master_seed = 0;
    Provenance provenance = Provenance::External;
    // Per path, the freeze index of its time change (-1 when none).
    std::vector<std::int64_t> frozen_from;

    double at(std::size_t path, std::size_t k) const { return samples[path * tgrid.size() + k]; }
    std::vector<double> column(std::size_t k) const;
    std::vector<double> sorted_column(std::size_t k) const;
};

struct SimulateOptions {
    double mesh = 0.0125;
    double solver_tol = 1e-9;
    double snap_eps = 1e-8;
    int max_retries = 10;
    // Initial horizon: horizon_factor * t_last * max(1, sigma(0, x0)),
    // rounded up to whole mesh cells; doubled on each retry.
    double horizon_factor = 4.0;
    int workers = 1;
    QuadratureSettings quad;
};

// One deterministic draw of the full construction for a given path index:
// base path, time change on tgrid, and X = M o tau.
struct PathBundle {
    RcllPath base;
    TimeChange tc;
    RcllPath x;
};

PathBundle simulate_bundle(const ProcessSpec& spec, const CoefficientModel& model,
                           const std::vector<double>& tgrid, std::uint64_t master_seed,
                           std::uint64_t path_index, const SimulateOptions& opts);

// Fans the construction out over N counter-based streams and records the
// grid marginals. Horizon-exhausted paths retry with a doubled base horizon;
// exhaustion of the retries raises InfeasibleScenario naming the stream.
MarginalEnsemble simulate_marginals(const ProcessSpec& spec, const CoefficientModel& model,
                                    std::size_t n_paths, const std::vector<double>& tgrid,
                                    std::uint64_t master_seed, const SimulateOptions& opts);

// Weak Fokker-Planck residual per (test function, grid time): the moment
// increment against the time-quadrature of the generator moment.
struct FpCell {
    std::string function;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double mc_standard_error = 0.0;
    double quadrature_bound = 0.0;
    bool pass = false;
};

struct FpReport {
    std::vector<FpCell> cells;
    bool all_pass = true;
};

struct FpOptions {
    double sigma_multiplier = 3.0;  // pass iff |residual| <= mult*SE + quad bound
};

FpReport fp_residual(const MarginalEnsemble& ens, const ProcessSpec& spec,
                     const CoefficientModel& model, const std::vector<TestFunction>& dictionary,
                     const FpOptions& opts = {});

// The space-time operator applied to a product f x g at (t, x):
// g(t) sigma(t,x) Af(x) + f(x) g'(t).
double spacetime_operator(const TestFunction& f, const CutoffFunction& g, double t, double x,
                          const ProcessSpec& spec, const CoefficientModel& model);

struct SpacetimeResidual {
    std::vector<ResidualStat> stats;
    // The first component of the lifted process is s0 + t by construction;
    // asserted on evaluation.
    bool time_component_exact = true;
};

// Martingale residual of the lifted pair (s0 + t, X_t) under the space-time
// operator. The ensemble must have been simulated with the coefficient
// shifted by s0; `model` is the unshifted coefficient.
SpacetimeResidual spacetime_martingale_residual(const MarginalEnsemble& ens, double s0,
                                                const ProcessSpec& spec, const CoefficientModel& model,
                                                const TestFunction& f, const CutoffFunction& g,
                                                const std::vector<double>& report_times,
                                                int subgrid_factor = 4);

struct KsCell {
    double t = 0.0;
    double ks_statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct KsReport {
    std::vector<KsCell> cells;
    bool all_pass = true;
};

// Two-sample Kolmogorov-Smirnov comparison of the marginals, per grid time.
KsReport uniqueness_crosscheck(const MarginalEnsemble& a, const MarginalEnsemble& b,
                               double alpha = 0.01);

struct EulerMaruyamaOptions {
    double step = 0.005;
    int workers = 1;
};

// Independent oracle pipeline: explicit scheme for dX = sqrt(sigma(t, X)) dW
// (Brownian base). Roundoff negatives under the square root are clipped.
MarginalEnsemble euler_maruyama_marginals(const CoefficientModel& model, double x0,
                                          std::size_t n_paths, const std::vector<double>& tgrid,
                                          std::uint64_t master_seed,
                                          const EulerMaruyamaOptions& opts = {});

}  // namespace tclab
