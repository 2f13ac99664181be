#include "tclab/timechange.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tclab/errors.hpp"

namespace tclab {

namespace {

constexpr double kSigmaFloor = 1e-300;

double checked_eval(const ClockIntegrand& g, double r, double s, SolverStats& stats) {
    const double v = g(r, s);
    if (!std::isfinite(v) || v < 0.0)
        throw NumericFailure("solve_caratheodory: integrand(" + std::to_string(r) + ", " +
                             std::to_string(s) + ") = " + std::to_string(v));
    if (v > 0.0) stats.min_sigma = std::min(stats.min_sigma, 1.0 / v);
    return v;
}

// One classical 4th-order step from (s, T) of size h. The right endpoint of
// the enclosing segment is evaluated through its left limit, so forced
// breaks act as left-closed boundaries for piecewise integrands.
double rk4_step(const ClockIntegrand& g, double s, double T, double h, double seg_end,
                SolverStats& stats) {
    const auto at = [&](double si) { return si >= seg_end ? std::nextafter(seg_end, s) : si; };
    const double k1 = checked_eval(g, T, at(s), stats);
    const double k2 = checked_eval(g, T + 0.5 * h * k1, at(s + 0.5 * h), stats);
    const double k3 = checked_eval(g, T + 0.5 * h * k2, at(s + 0.5 * h), stats);
    const double k4 = checked_eval(g, T + h * k3, at(s + h), stats);
    return T + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate [sa, min(s_stop, sb)] from Ta with n uniform steps (partial
// final step when s_stop is interior).
double integrate_to(const ClockIntegrand& g, double sa, double Ta, double sb, std::size_t n,
                    double s_stop, SolverStats& stats) {
    const double h = (sb - sa) / static_cast<double>(n);
    double s = sa;
    double T = Ta;
    for (std::size_t k = 0; k < n; ++k) {
        const double s_next = (k + 1 == n) ? sb : sa + h * static_cast<double>(k + 1);
        if (s_next >= s_stop) {
            if (s_stop > s) T = rk4_step(g, s, T, s_stop - s, sb, stats);
            return T;
        }
        T = rk4_step(g, s, T, s_next - s, sb, stats);
        s = s_next;
    }
    return T;
}

// First s in [sa, sb] with T(s) >= level, via safeguarded regula falsi on
// re-integration from (sa, Ta).
double crossing_time(const ClockIntegrand& g, double sa, double Ta, double sb, double Tb,
                     std::size_t n, double level, SolverStats& stats) {
    if (Ta >= level) return sa;
    double lo = sa, hi = sb;
    double flo = Ta - level, fhi = Tb - level;
    const double eps = 1e-15 * std::max(1.0, std::fabs(sb));
    int last_side = 0;
    for (int iter = 0; iter < 120 && hi - lo > eps; ++iter) {
        double s = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
        const double fs = integrate_to(g, sa, Ta, sb, n, s, stats) - level;
        if (fs == 0.0) return s;
        if (fs < 0.0) {
            lo = s;
            flo = fs;
            if (last_side == -1) fhi *= 0.5;  // Illinois damping
            last_side = -1;
        } else {
            hi = s;
            fhi = fs;
            if (last_side == 1) flo *= 0.5;
            last_side = 1;
        }
    }
    return hi;
}

double snap_to_breaks(double s, const std::vector<double>& breaks, double snap_eps) {
    auto it = std::lower_bound(breaks.begin(), breaks.end(), s);
    double best = s;
    double dist = snap_eps;
    if (it != breaks.end() && std::fabs(*it - s) <= dist) {
        best = *it;
        dist = std::fabs(*it - s);
    }
    if (it != breaks.begin() && std::fabs(*(it - 1) - s) <= dist) best = *(it - 1);
    return best;
}

}  // namespace

InverseClock solve_caratheodory(const ClockIntegrand& integrand, double S, double T_horizon,
                                const CaratheodorySettings& settings) {
    if (!(S >= 0.0)) throw InvalidArgument("solve_caratheodory: target S must be >= 0");
    if (!(T_horizon > 0.0)) throw InvalidArgument("solve_caratheodory: T_horizon must be positive");
    for (std::size_t i = 1; i < settings.levels.size(); ++i) {
        if (!(settings.levels[i] > settings.levels[i - 1]))
            throw InvalidArgument("solve_caratheodory: levels must be increasing");
    }

    InverseClock clock;
    clock.level_times.assign(settings.levels.size(), std::numeric_limits<double>::quiet_NaN());
    clock.breakpoints.push_back(0.0);
    clock.values.push_back(0.0);

    // Segment boundaries: forced breaks inside (0, T_horizon), then T_horizon.
    std::vector<double> bounds;
    for (double b : settings.forced_breaks) {
        if (b > 0.0 && b < T_horizon) bounds.push_back(b);
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    bounds.push_back(T_horizon);

    if (settings.verify_lipschitz) {
        for (double r : {0.0, 0.25 * S, 0.5 * S, 0.75 * S}) {
            const double delta = std::max(1e-9, 1e-6 * std::max(S, 1.0));
            const double s_probe = 0.5 * bounds.front();
            const double dd = (integrand(r + delta, s_probe) - integrand(r, s_probe)) / delta;
            if (!std::isfinite(dd))
                throw InvalidArgument("solve_caratheodory: integrand fails the sampled Lipschitz probe");
        }
    }

    std::size_t next_level = 0;
    const auto resolve_levels = [&](double sa, double Ta, double sb, double Tb, std::size_t n) {
        while (next_level < settings.levels.size() && settings.levels[next_level] <= Tb) {
            double s_star = crossing_time(integrand, sa, Ta, sb, Tb, n, settings.levels[next_level],
                                          clock.stats);
            s_star = snap_to_breaks(s_star, bounds, settings.snap_eps);
            clock.level_times[next_level] = s_star;
            ++next_level;
        }
    };

    // Levels at or below T(0) = 0 resolve at s = 0.
    while (next_level < settings.levels.size() && settings.levels[next_level] <= 0.0) {
        clock.level_times[next_level++] = 0.0;
    }
    if (S == 0.0) {
        clock.terminal = ClockTerminal::HitTarget;
        clock.hit_time = 0.0;
        return clock;
    }

    double sa = 0.0;
    double Ta = 0.0;
    for (double sb : bounds) {
        if (!(sb > sa)) continue;
        const double seg_tol =
            std::max(settings.tol * (sb - sa) / T_horizon, 4.0 * 1e-16 * (std::fabs(Ta) + 1.0));
        std::size_t n = 1;
        double T_coarse = integrate_to(integrand, sa, Ta, sb, n, sb, clock.stats);
        double Tb = T_coarse;
        for (int round = 0;; ++round) {
            if (round >= settings.max_halvings || n > (1u << 20))
                throw NumericFailure("solve_caratheodory: no convergence on segment [" +
                                     std::to_string(sa) + ", " + std::to_string(sb) + "]");
            const std::size_t n2 = 2 * n;
            const double T_fine = integrate_to(integrand, sa, Ta, sb, n2, sb, clock.stats);
            if (std::fabs(T_fine - T_coarse) < seg_tol) {
                clock.stats.rejected_steps += n;
                n = n2;
                Tb = T_fine;
                break;
            }
            clock.stats.rejected_steps += n;
            n = n2;
            T_coarse = T_fine;
        }
        clock.stats.steps += n;

        if (Tb >= S) {
            // Target hit inside this segment; resolve remaining levels then S.
            resolve_levels(sa, Ta, sb, Tb, n);
            double s_hit = crossing_time(integrand, sa, Ta, sb, Tb, n, S, clock.stats);
            s_hit = snap_to_breaks(s_hit, bounds, settings.snap_eps);
            clock.terminal = ClockTerminal::HitTarget;
            clock.hit_time = s_hit;
            clock.breakpoints.push_back(s_hit);
            clock.values.push_back(S);
            return clock;
        }
        resolve_levels(sa, Ta, sb, Tb, n);
        clock.breakpoints.push_back(sb);
        clock.values.push_back(Tb);
        sa = sb;
        Ta = Tb;
    }
    clock.terminal = ClockTerminal::Horizon;
    return clock;
}

TimeChange build_time_change(const RcllPath& path, const CoefficientModel& model,
                             const std::vector<double>& tgrid, const TimeChangeSettings& settings) {
    if (tgrid.empty()) throw InvalidArgument("build_time_change: empty tgrid");
    if (tgrid.front() != 0.0) throw InvalidArgument("build_time_change: tgrid must start at 0");
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        if (!(tgrid[k] > tgrid[k - 1])) throw InvalidArgument("build_time_change: tgrid not increasing");
    }
    if (tgrid.back() > model.t0() + 1e-12)
        throw InvalidArgument("build_time_change: tgrid extends past t0");

    TimeChange tc;
    tc.tgrid = tgrid;
    const double t_last = tgrid.back();

    const BlowupScan scan = scan_inverse_h(model, path, path.horizon(), settings.quad);
    tc.rho = scan.rho;
    const double s_end = std::min(scan.rho.value_or(path.horizon()), path.horizon());

    if (s_end <= 0.0) {
        // Blow-up at time zero: tau == rho == 0 everywhere, frozen from the
        // first positive grid point.
        tc.tau.assign(tgrid.size(), 0.0);
        tc.frozen_from = (tgrid.size() > 1) ? std::optional<std::size_t>(1) : std::nullopt;
        if (tgrid.size() == 1) tc.frozen_from = std::nullopt;
        return tc;
    }

    // Clock values above the last grid level are never used; clamping keeps
    // sigma evaluations inside [0, t0] where sigma_tilde is defined.
    const ClockIntegrand integrand = [&](double r, double s) {
        const double sigma = model.sigma(std::min(r, t_last), path.evaluate(s));
        if (sigma < kSigmaFloor) return std::numeric_limits<double>::infinity();
        return 1.0 / sigma;
    };

    CaratheodorySettings cs;
    cs.tol = settings.tol;
    cs.snap_eps = settings.snap_eps;
    cs.levels = tgrid;
    for (double b : path.breakpoints()) {
        if (b > 0.0 && b < s_end) cs.forced_breaks.push_back(b);
    }

    const InverseClock clock = solve_caratheodory(integrand, t_last, s_end, cs);
    tc.solver_stats = clock.stats;

    if (clock.terminal == ClockTerminal::HitTarget) {
        tc.tau = clock.level_times;
        return tc;
    }
    if (!scan.rho || s_end < *scan.rho) {
        throw HorizonExhausted("build_time_change: clock exhausted the base path (T(horizon) < " +
                               std::to_string(t_last) + "); extend the base horizon and retry");
    }
    // Freeze: unreached levels sit at rho from the freeze index onward.
    tc.tau = clock.level_times;
    for (std::size_t k = 0; k < tc.tau.size(); ++k) {
        if (std::isnan(tc.tau[k])) {
            if (!tc.frozen_from) tc.frozen_from = k;
            tc.tau[k] = *scan.rho;
        }
    }
    return tc;
}

RcllPath apply_time_change(const RcllPath& path, const TimeChange& tc) {
    std::vector<double> values(tc.tgrid.size());
    for (std::size_t k = 0; k < tc.tgrid.size(); ++k) {
        if (tc.tau[k] > path.horizon())
            throw OutOfRange("apply_time_change: tau exceeds the base horizon");
        values[k] = path.evaluate(tc.tau[k]);
    }
    return RcllPath(tc.tgrid, std::move(values), tc.tgrid.back(), PathKind::MeshSampled);
}

FixedPointResidual fixed_point_residual(const RcllPath& base, const RcllPath& x,
                                        const CoefficientModel& model, const std::vector<double>& tgrid,
                                        const FixedPointOptions& opts) {
    if (tgrid.empty()) throw InvalidArgument("fixed_point_residual: empty tgrid");
    if (tgrid.back() > x.horizon()) throw OutOfRange("fixed_point_residual: tgrid exceeds X horizon");

    // sigma integrated along the step-evaluated X: exact in space on each
    // cell of X, trapezoid in time on a subgrid of the cell.
    const auto& xb = x.breakpoints();
    const auto& xv = x.values();
    std::vector<double> cumulative(xb.size(), 0.0);
    const int sub = std::max(1, opts.subgrid_factor);
    const auto cell_integral = [&](double a, double b, double value) {
        double acc = 0.0;
        double prev_s = a;
        double prev_f = model.sigma(a, value);
        for (int j = 1; j <= sub; ++j) {
            const double s = a + (b - a) * j / sub;
            const double f = model.sigma(s, value);
            acc += 0.5 * (f + prev_f) * (s - prev_s);
            prev_s = s;
            prev_f = f;
        }
        return acc;
    };
    for (std::size_t i = 1; i < xb.size(); ++i)
        cumulative[i] = cumulative[i - 1] + cell_integral(xb[i - 1], xb[i], xv[i - 1]);

    FixedPointResidual out;
    out.per_point.resize(tgrid.size());
    out.clock.resize(tgrid.size());
    for (std::size_t k = 0; k < tgrid.size(); ++k) {
        const double t = tgrid[k];
        const std::size_t j = x.segment_index(t);
        double u = cumulative[j];
        if (t > xb[j]) u += cell_integral(xb[j], t, xv[j]);
        if (u > base.horizon() + opts.snap_eps)
            throw OutOfRange("fixed_point_residual: clock value " + std::to_string(u) +
                             " beyond the base horizon");
        const double xval = x.evaluate(t);
        const double bval = base.evaluate_snapped(u, opts.snap_eps);
        const double diff = opts.discrete_state ? (xval == bval ? 0.0 : 1.0) : std::fabs(xval - bval);
        out.per_point[k] = diff;
        out.clock[k] = u;
        out.sup = std::max(out.sup, diff);
    }
    return out;
}

TimeChange forward_euler_time_change(const RcllPath& path, const CoefficientModel& model,
                                     const std::vector<double>& tgrid) {
    if (tgrid.empty() || tgrid.front() != 0.0)
        throw InvalidArgument("forward_euler_time_change: tgrid must start at 0");
    TimeChange tc;
    tc.tgrid = tgrid;
    tc.tau.resize(tgrid.size());
    tc.tau[0] = 0.0;
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        const double t_prev = tgrid[k - 1];
        const double sigma = model.sigma(t_prev, path.evaluate(tc.tau[k - 1]));
        if (sigma <= 0.0)
            throw DegenerateRegime("forward_euler_time_change: sigma = 0 at t = " +
                                   std::to_string(t_prev) + " (zero of H on the visited range)");
        tc.solver_stats.min_sigma = std::min(tc.solver_stats.min_sigma, sigma);
        tc.tau[k] = tc.tau[k - 1] + (tgrid[k] - t_prev) * sigma;
        ++tc.solver_stats.steps;
        if (tc.tau[k] > path.horizon())
            throw OutOfRange("forward_euler_time_change: tau left the base horizon");
    }
    return tc;
}

}  // namespace tclab
