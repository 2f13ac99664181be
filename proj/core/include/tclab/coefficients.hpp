#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tclab/rcll_path.hpp"

namespace tclab {

// A declared zero of H with its local power-law exponent:
// H(x) ~ c |x - location|^exponent near the zero. An infinite exponent marks
// faster-than-polynomial decay (e.g. the edge of a bump support).
struct ZeroPoint {
    double location = 0.0;
    double exponent = 1.0;
};

struct CoefficientBounds {
    double c1 = 0.0;  // Lipschitz-in-t constant of sigma_tilde
    double c2 = 0.0;  // lower bound of sigma_tilde
    double c3 = 0.0;  // upper bound of sigma_tilde
};

// sigma(t, x) = H(x) * sigma_tilde(t, x) for t <= t0, and 0 for t > t0.
// H >= 0 may vanish on the declared zero set; sigma_tilde > 0 on [0, t0].
class CoefficientModel {
public:
    CoefficientModel(std::function<double(double)> h,
                     std::function<double(double, double)> sigma_tilde, double t0,
                     std::vector<ZeroPoint> zeros = {},
                     std::optional<CoefficientBounds> declared_bounds = std::nullopt);

    double h(double x) const { return h_(x); }
    double sigma_tilde(double t, double x) const { return sigma_tilde_(t, x); }

    // The hard t0 cutoff is applied here, not inside sigma_tilde.
    double sigma(double t, double x) const {
        if (t > t0_) return 0.0;
        return h_(x) * sigma_tilde_(t, x);
    }

    double t0() const { return t0_; }
    const std::vector<ZeroPoint>& zeros() const { return zeros_; }
    bool declared_zero_free() const { return zeros_.empty(); }
    const std::optional<CoefficientBounds>& declared_bounds() const { return declared_bounds_; }

    std::optional<ZeroPoint> zero_near(double x, double tol) const;

    // The model seen from time s0: sigma'(t, x) = sigma(s0 + t, x). For
    // s0 >= t0 the coefficient is identically zero.
    CoefficientModel shifted(double s0) const;

    // Sampled nonnegativity of H; throws InvalidArgument on a violation.
    void probe_h_nonnegative(double x_lo, double x_hi, int points = 1000) const;

    // Sampled positivity of sigma_tilde on [0, t0 - t0/100] x [x_lo, x_hi].
    void probe_sigma_tilde_positive(double x_lo, double x_hi, int points = 100) const;

private:
    std::function<double(double)> h_;
    std::function<double(double, double)> sigma_tilde_;
    double t0_;
    std::vector<ZeroPoint> zeros_;
    std::optional<CoefficientBounds> declared_bounds_;
};

inline double evaluate_sigma(const CoefficientModel& model, double t, double x) {
    return model.sigma(t, x);
}

enum class ZeroVerdict { InIH, NotInIH, Inconclusive };

const char* to_string(ZeroVerdict v);

struct ZeroClassification {
    double point = 0.0;
    ZeroVerdict verdict = ZeroVerdict::Inconclusive;
    std::string evidence;
    double partial_sum = 0.0;        // quadrature route only
    double exponent_estimate = 0.0;  // quadrature route only
};

struct QuadratureSettings {
    double min_shell_width = 1e-10;
    double divergence_threshold = 1e8;
    double cauchy_tol = 1e-6;
    // The shell-mass refinement trend decides borderline cases; estimates
    // within this margin of exponent 1 stay inconclusive.
    double exponent_margin = 0.02;
    bool force_quadrature = false;
};

// Membership of a zero of H in the non-integrability set I(H):
// with a declared exponent p the rule is exact (in iff p >= 1); otherwise
// geometric-shell quadrature of 1/H classifies by partial-sum divergence,
// tail convergence, or the shell-mass refinement trend.
ZeroClassification classify_zero(const CoefficientModel& model, double z, double epsilon,
                                 const QuadratureSettings& quad = {});

struct AssumptionReport {
    double c1_est = 0.0;
    double c2_est = 0.0;
    double c3_est = 0.0;
    bool lipschitz_ok = false;
    bool bounds_ok = false;
};

// Lattice estimates of the sigma_tilde constants on [0, S] x [x_lo, x_hi].
AssumptionReport check_assumptions(const CoefficientModel& model, double x_lo, double x_hi,
                                   double S, int t_points = 200, int x_points = 200);

// Result of walking one path against the model: rho0 is the first entry
// into the declared zero set (exact for piecewise-constant paths, first mesh
// point after a crossing for mesh paths), rho the first blow-up of the
// running quadrature of 1/H along the path.
struct RegularityRecord {
    std::optional<double> rho0;
    std::optional<double> rho;
    bool consistent = false;
};

std::vector<RegularityRecord> regularity_probe(const CoefficientModel& model,
                                               const std::vector<RcllPath>& paths,
                                               const QuadratureSettings& quad = {});

// Shared rho scan used by the probe and by the time-change builder.
struct BlowupScan {
    std::optional<double> rho;
    std::optional<double> rho0;
    bool zero_evidence_at_rho = false;  // rho fired on a zero hit/crossing
    double accumulated = 0.0;           // running integral of 1/H before rho
};

BlowupScan scan_inverse_h(const CoefficientModel& model, const RcllPath& path, double upto,
                          const QuadratureSettings& quad = {});

}  // namespace tclab
