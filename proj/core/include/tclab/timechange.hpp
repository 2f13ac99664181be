#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tclab/coefficients.hpp"
#include "tclab/rcll_path.hpp"

namespace tclab {

struct SolverStats {
    std::size_t steps = 0;              // accepted steps at the final refinement
    std::size_t rejected_steps = 0;     // steps discarded during halving rounds
    double min_sigma = std::numeric_limits<double>::infinity();
};

enum class ClockTerminal { HitTarget, Horizon };

// The inverse clock T solving T(s) = int_0^s gamma(T(r), r) dr, tabulated at
// its forced breakpoints, together with the resolved crossing times of the
// requested levels.
struct InverseClock {
    std::vector<double> breakpoints;  // s
    std::vector<double> values;       // T(s)
    ClockTerminal terminal = ClockTerminal::Horizon;
    double hit_time = std::numeric_limits<double>::quiet_NaN();  // s with T(s) = target
    std::vector<double> level_times;  // per requested level; NaN when unreached
    SolverStats stats;
};

// gamma(r, s): r is the current clock value, s the integration time.
using ClockIntegrand = std::function<double(double r, double s)>;

struct CaratheodorySettings {
    double tol = 1e-9;
    // Discontinuities of the integrand in s; every one is a step boundary.
    std::vector<double> forced_breaks;
    // Clock levels whose crossing times are resolved by root finding;
    // must be increasing.
    std::vector<double> levels;
    // Crossing times within snap_eps of a forced break snap onto it.
    double snap_eps = 1e-8;
    int max_halvings = 24;
    // Sampled divided-difference check of Lipschitz continuity in r.
    bool verify_lipschitz = false;
};

// Classical 4th-order stepping with per-segment halving until two successive
// refinements agree at the segment end. Terminates either when T reaches S
// (terminal HitTarget, at hit_time <= T_horizon) or at s = T_horizon with
// T < S throughout (terminal Horizon) -- the two-way dichotomy of the
// underlying existence lemma.
InverseClock solve_caratheodory(const ClockIntegrand& integrand, double S, double T_horizon,
                                const CaratheodorySettings& settings = {});

// The time change tau on tgrid: tau(t) = inf{s : T(s) >= t}, capped at the
// blow-up time rho, constant (= rho) from frozen_from onward.
struct TimeChange {
    std::vector<double> tgrid;
    std::vector<double> tau;
    std::optional<double> rho;
    std::optional<std::size_t> frozen_from;
    SolverStats solver_stats;
};

struct TimeChangeSettings {
    double tol = 1e-9;
    double snap_eps = 1e-8;
    QuadratureSettings quad;
};

// Lemma-style construction along one fixed path: scan for rho, solve the
// inverse clock with integrand 1/sigma(T(r), M_r), invert at the grid
// levels, freeze at rho. Throws HorizonExhausted when the path ends before
// the clock reaches the last grid point and no blow-up occurred.
TimeChange build_time_change(const RcllPath& path, const CoefficientModel& model,
                             const std::vector<double>& tgrid, const TimeChangeSettings& settings = {});

// X_t = M_{tau(t)} sampled on the grid of the time change.
RcllPath apply_time_change(const RcllPath& path, const TimeChange& tc);

struct FixedPointResidual {
    double sup = 0.0;
    std::vector<double> per_point;   // |X_t - M_{u(t)}| per grid time
    std::vector<double> clock;       // u(t) = int_0^t sigma(s, X_s) ds
};

struct FixedPointOptions {
    int subgrid_factor = 4;
    double snap_eps = 1e-8;
    bool discrete_state = false;  // 0/1 mismatch distance (chains)
};

// Residual of the pathwise fixed-point identity X_t = M_{int_0^t sigma(s, X_s) ds},
// with the integral taken along the step-evaluated X.
FixedPointResidual fixed_point_residual(const RcllPath& base, const RcllPath& x,
                                        const CoefficientModel& model, const std::vector<double>& tgrid,
                                        const FixedPointOptions& opts = {});

// Forward Euler on d tau/dt = sigma(t, M_{tau(t)}). Only valid while sigma
// stays away from zero along the visited segment; the degenerate regime is
// refused. Retained as a cross-check of the inverse-clock construction.
TimeChange forward_euler_time_change(const RcllPath& path, const CoefficientModel& model,
                                     const std::vector<double>& tgrid);

}  // namespace tclab
