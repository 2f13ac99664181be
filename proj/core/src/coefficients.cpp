#include "tclab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tclab/errors.hpp"

namespace tclab {

namespace {

constexpr double kZeroHitTol = 1e-12;
constexpr double kHFloor = 1e-300;
constexpr double kInf = std::numeric_limits<double>::infinity();

double inverse_h(const CoefficientModel& model, double y) {
    const double h = model.h(y);
    if (h < 0.0) throw InvalidArgument("coefficients: H is negative at x=" + std::to_string(y));
    if (h < kHFloor) return kInf;
    return 1.0 / h;
}

double adaptive_simpson(const CoefficientModel& model, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = inverse_h(model, lm);
    const double frm = inverse_h(model, rm);
    if (std::isinf(fa) || std::isinf(fm) || std::isinf(fb) || std::isinf(flm) || std::isinf(frm))
        return kInf;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(model, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(model, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Integral of 1/H over [a, b], assuming H > 0 on the interior except at
// declared zeros excluded by the caller.
double integrate_inverse_h(const CoefficientModel& model, double a, double b, double tol = 1e-12) {
    if (!(b > a)) return 0.0;
    const double fa = inverse_h(model, a);
    const double fm = inverse_h(model, 0.5 * (a + b));
    const double fb = inverse_h(model, b);
    if (std::isinf(fa) || std::isinf(fm) || std::isinf(fb)) return kInf;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(model, a, b, fa, fm, fb, whole, tol, 28);
}

// Integral of 1/H over [lo, hi] when declared zeros may sit inside.
// Around each interior zero a delta-shell is evaluated in closed form from
// the declared exponent; returns +inf as soon as any piece diverges.
double integrate_inverse_h_with_zeros(const CoefficientModel& model, double lo, double hi) {
    std::vector<ZeroPoint> inside;
    for (const auto& zp : model.zeros()) {
        if (zp.location >= lo - kZeroHitTol && zp.location <= hi + kZeroHitTol) inside.push_back(zp);
    }
    std::sort(inside.begin(), inside.end(),
              [](const ZeroPoint& a, const ZeroPoint& b) { return a.location < b.location; });
    double total = 0.0;
    double cursor = lo;
    for (const auto& zp : inside) {
        if (zp.exponent >= 1.0) return kInf;
        const double delta = std::min(1e-6, 0.25 * (hi - lo));
        const double z = zp.location;
        if (z - delta > cursor) total += integrate_inverse_h(model, cursor, z - delta);
        for (double side : {z - delta, z + delta}) {
            const double h_side = model.h(side);
            if (h_side < kHFloor) return kInf;
            // H(y) ~ c |y-z|^p with c from the shell edge
            const double c = h_side / std::pow(delta, zp.exponent);
            total += std::pow(delta, 1.0 - zp.exponent) / (c * (1.0 - zp.exponent));
        }
        cursor = std::min(z + delta, hi);
        if (std::isinf(total)) return kInf;
    }
    if (hi > cursor) total += integrate_inverse_h(model, cursor, hi);
    return total;
}

}  // namespace

CoefficientModel::CoefficientModel(std::function<double(double)> h,
                                   std::function<double(double, double)> sigma_tilde, double t0,
                                   std::vector<ZeroPoint> zeros,
                                   std::optional<CoefficientBounds> declared_bounds)
    : h_(std::move(h)),
      sigma_tilde_(std::move(sigma_tilde)),
      t0_(t0),
      zeros_(std::move(zeros)),
      declared_bounds_(std::move(declared_bounds)) {
    if (!h_ || !sigma_tilde_) throw InvalidArgument("CoefficientModel: missing callables");
    if (!(t0_ > 0.0)) throw InvalidArgument("CoefficientModel: t0 must be positive");
    for (const auto& zp : zeros_) {
        if (!(zp.exponent > 0.0)) throw InvalidArgument("CoefficientModel: zero exponent must be positive");
    }
}

std::optional<ZeroPoint> CoefficientModel::zero_near(double x, double tol) const {
    for (const auto& zp : zeros_) {
        if (std::fabs(x - zp.location) <= tol) return zp;
    }
    return std::nullopt;
}

CoefficientModel CoefficientModel::shifted(double s0) const {
    if (s0 < 0.0) throw InvalidArgument("CoefficientModel::shifted: s0 must be >= 0");
    if (s0 >= t0_) {
        // sigma(s0 + t, .) == 0 for all t > 0: the frozen model.
        return CoefficientModel([](double) { return 0.0; }, [](double, double) { return 1.0; }, 1.0);
    }
    auto st = sigma_tilde_;
    return CoefficientModel(
        h_, [st, s0](double t, double x) { return st(t + s0, x); }, t0_ - s0, zeros_, declared_bounds_);
}

void CoefficientModel::probe_h_nonnegative(double x_lo, double x_hi, int points) const {
    for (int i = 0; i < points; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / (points - 1);
        const double v = h_(x);
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidArgument("CoefficientModel: H(" + std::to_string(x) + ") = " + std::to_string(v));
    }
}

void CoefficientModel::probe_sigma_tilde_positive(double x_lo, double x_hi, int points) const {
    const double t_hi = t0_ - t0_ / 100.0;
    for (int i = 0; i < points; ++i) {
        const double t = t_hi * i / (points - 1);
        for (int j = 0; j < points; ++j) {
            const double x = x_lo + (x_hi - x_lo) * j / (points - 1);
            const double v = sigma_tilde_(t, x);
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidArgument("CoefficientModel: sigma_tilde(" + std::to_string(t) + ", " +
                                      std::to_string(x) + ") = " + std::to_string(v));
        }
    }
}

const char* to_string(ZeroVerdict v) {
    switch (v) {
        case ZeroVerdict::InIH: return "in_IH";
        case ZeroVerdict::NotInIH: return "not_in_IH";
        default: return "inconclusive";
    }
}

ZeroClassification classify_zero(const CoefficientModel& model, double z, double epsilon,
                                 const QuadratureSettings& quad) {
    if (!(epsilon > 0.0)) throw InvalidArgument("classify_zero: epsilon must be positive");
    const auto declared = model.zero_near(z, kZeroHitTol);
    if (!declared && !(std::fabs(model.h(z)) <= kZeroHitTol))
        throw InvalidArgument("classify_zero: H(" + std::to_string(z) + ") != 0 and z not declared");

    ZeroClassification out;
    out.point = z;

    if (declared && !quad.force_quadrature) {
        out.verdict = (declared->exponent >= 1.0) ? ZeroVerdict::InIH : ZeroVerdict::NotInIH;
        out.evidence = "declared exponent p=" + std::to_string(declared->exponent);
        out.exponent_estimate = declared->exponent;
        return out;
    }

    // Geometric shells toward z from both sides, halving until they fall
    // below the minimum width.
    std::vector<double> masses;
    double partial = 0.0;
    for (int k = 0;; ++k) {
        const double outer = epsilon * std::pow(0.5, k);
        const double inner = 0.5 * outer;
        if (outer - inner < quad.min_shell_width) break;
        const double mass = integrate_inverse_h(model, z + inner, z + outer) +
                            integrate_inverse_h(model, z - outer, z - inner);
        masses.push_back(mass);
        partial += mass;
        if (partial > quad.divergence_threshold) {
            out.verdict = ZeroVerdict::InIH;
            out.partial_sum = partial;
            out.evidence = "partial sums exceeded divergence threshold";
            out.exponent_estimate = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
    }
    out.partial_sum = partial;
    if (masses.size() < 4) {
        out.verdict = ZeroVerdict::Inconclusive;
        out.evidence = "too few shells above the width floor";
        return out;
    }

    // Refinement trend: for H ~ c|y-z|^p the shell-mass ratio tends to
    // 2^(p-1), so the trend estimates the local exponent.
    const std::size_t lag = std::min<std::size_t>(6, masses.size() - 1);
    const double last = masses.back();
    const double earlier = masses[masses.size() - 1 - lag];
    if (last <= 0.0 || earlier <= 0.0) {
        out.verdict = ZeroVerdict::NotInIH;
        out.evidence = "vanishing shell masses";
        return out;
    }
    const double ratio = std::pow(last / earlier, 1.0 / static_cast<double>(lag));
    const double p_hat = 1.0 + std::log2(ratio);
    out.exponent_estimate = p_hat;

    if (ratio < 1.0) {
        const double tail = last * ratio / (1.0 - ratio);
        if (tail < quad.cauchy_tol) {
            out.verdict = ZeroVerdict::NotInIH;
            out.evidence = "Cauchy increments below tolerance (tail bound " + std::to_string(tail) + ")";
            return out;
        }
    }
    if (p_hat >= 1.0 + quad.exponent_margin) {
        out.verdict = ZeroVerdict::InIH;
        out.evidence = "divergent refinement trend, exponent estimate " + std::to_string(p_hat);
    } else if (p_hat <= 1.0 - quad.exponent_margin) {
        out.verdict = ZeroVerdict::NotInIH;
        out.evidence = "convergent refinement trend, exponent estimate " + std::to_string(p_hat);
    } else {
        out.verdict = ZeroVerdict::Inconclusive;
        out.evidence = "exponent estimate " + std::to_string(p_hat) + " within margin of 1";
    }
    return out;
}

AssumptionReport check_assumptions(const CoefficientModel& model, double x_lo, double x_hi, double S,
                                   int t_points, int x_points) {
    if (!(S > 0.0) || S >= model.t0()) throw InvalidArgument("check_assumptions: need 0 < S < t0");
    if (!(x_hi > x_lo)) throw InvalidArgument("check_assumptions: empty window");
    if (t_points < 2 || x_points < 2) throw InvalidArgument("check_assumptions: lattice too small");

    AssumptionReport rep;
    rep.c2_est = kInf;
    rep.c3_est = -kInf;
    rep.c1_est = 0.0;
    bool all_finite = true;
    const double dt = S / (t_points - 1);
    for (int j = 0; j < x_points; ++j) {
        const double x = x_lo + (x_hi - x_lo) * j / (x_points - 1);
        double prev = 0.0;
        for (int i = 0; i < t_points; ++i) {
            const double t = dt * i;
            const double v = model.sigma_tilde(t, x);
            if (!std::isfinite(v)) all_finite = false;
            rep.c2_est = std::min(rep.c2_est, v);
            rep.c3_est = std::max(rep.c3_est, v);
            if (i > 0) rep.c1_est = std::max(rep.c1_est, std::fabs(v - prev) / dt);
            prev = v;
        }
    }
    rep.lipschitz_ok = std::isfinite(rep.c1_est);
    rep.bounds_ok = all_finite && rep.c2_est > 0.0;
    return rep;
}

BlowupScan scan_inverse_h(const CoefficientModel& model, const RcllPath& path, double upto,
                          const QuadratureSettings& quad) {
    BlowupScan scan;
    const auto& bp = path.breakpoints();
    const auto& vals = path.values();
    const bool mesh_kind = path.kind() == PathKind::MeshSampled;

    for (std::size_t i = 0; i < bp.size(); ++i) {
        const double start = bp[i];
        if (start >= upto) break;
        const double end = (i + 1 < bp.size()) ? std::min(bp[i + 1], upto) : upto;
        const double duration = end - start;
        const double v = vals[i];
        const double h_here = model.h(v);

        const bool exact_hit = model.zero_near(v, kZeroHitTol).has_value();
        if (exact_hit && !scan.rho0) scan.rho0 = start;

        if ((exact_hit || h_here < kHFloor) && duration > 0.0) {
            scan.rho = start;
            scan.zero_evidence_at_rho = true;
            return scan;
        }

        // Mesh paths pass through intermediate values; a cell whose
        // endpoints straddle a declared zero is swept through it.
        bool crossing_handled = false;
        if (mesh_kind && i + 1 < vals.size() && bp[i + 1] <= upto + kZeroHitTol) {
            const double v_next = vals[i + 1];
            bool diverges = false;
            bool crossed_any = false;
            for (const auto& zp : model.zeros()) {
                if ((v - zp.location) * (v_next - zp.location) < 0.0) {
                    crossed_any = true;
                    if (!scan.rho0) scan.rho0 = bp[i + 1];
                    if (zp.exponent >= 1.0) diverges = true;
                }
            }
            if (diverges) {
                scan.rho = bp[i + 1];
                scan.zero_evidence_at_rho = true;
                return scan;
            }
            if (crossed_any) {
                const double lo = std::min(v, v_next);
                const double hi = std::max(v, v_next);
                const double sweep = integrate_inverse_h_with_zeros(model, lo, hi);
                if (std::isinf(sweep)) {
                    scan.rho = bp[i + 1];
                    scan.zero_evidence_at_rho = true;
                    return scan;
                }
                scan.accumulated += duration / (hi - lo) * sweep;
                crossing_handled = true;
            }
        }
        if (!crossing_handled) {
            const double before = scan.accumulated;
            scan.accumulated += duration / h_here;
            if (scan.accumulated > quad.divergence_threshold) {
                scan.rho = start + std::max(0.0, (quad.divergence_threshold - before) * h_here);
                scan.zero_evidence_at_rho = false;
                return scan;
            }
        }
        if (scan.accumulated > quad.divergence_threshold) {
            scan.rho = end;
            scan.zero_evidence_at_rho = false;
            return scan;
        }
    }
    return scan;
}

std::vector<RegularityRecord> regularity_probe(const CoefficientModel& model,
                                               const std::vector<RcllPath>& paths,
                                               const QuadratureSettings& quad) {
    std::vector<RegularityRecord> out;
    out.reserve(paths.size());
    for (const auto& path : paths) {
        const BlowupScan scan = scan_inverse_h(model, path, path.horizon(), quad);
        RegularityRecord rec;
        rec.rho0 = scan.rho0;
        rec.rho = scan.rho;
        if (!rec.rho0 && !rec.rho) {
            rec.consistent = true;
        } else if (rec.rho0 && rec.rho) {
            double step_tol = 0.0;
            if (path.kind() == PathKind::MeshSampled) {
                const auto& bp = path.breakpoints();
                for (std::size_t i = 1; i < bp.size(); ++i) step_tol = std::max(step_tol, bp[i] - bp[i - 1]);
            }
            const bool close = std::fabs(*rec.rho - *rec.rho0) <= step_tol + kZeroHitTol;
            const bool zero_at_rho =
                scan.zero_evidence_at_rho || model.zero_near(path.evaluate(std::min(*rec.rho, path.horizon())),
                                                             kZeroHitTol).has_value();
            rec.consistent = close && zero_at_rho;
        } else {
            rec.consistent = false;
        }
        out.push_back(rec);
    }
    return out;
}

}  // namespace tclab
