#pragma once

#include <optional>
#include <vector>

#include "tclab/coefficients.hpp"
#include "tclab/process.hpp"
#include "tclab/test_functions.hpp"

namespace tclab {

// The operator of the base process applied exactly to a dictionary element:
//   Brownian motion:   (1/2) f''(x)
//   compound Poisson:  rate * sum_i p_i (f(x + y_i) - f(x))
//   Markov chain:      sum_j Q[x][j] f(state_j), x must be a chain state
double apply_generator(const ProcessSpec& spec, const TestFunction& f, double x);

struct ResidualStat {
    double t = 0.0;
    double mean = 0.0;
    double standard_error = 0.0;
};

struct MartingaleResidualOptions {
    // The time integral runs on a subgrid with step <= (min tgrid spacing) /
    // subgrid_factor.
    int subgrid_factor = 4;
    // Quadrature nodes are computed times; lookups snap to path breakpoints
    // within this tolerance.
    double snap_eps = 1e-9;
};

// Empirical mean and standard error, per grid time, of
//   f(X_t) - f(X_0) - int_0^t  c(s, X_s) A f(X_s) ds
// across the given paths, where c = sigma when a coefficient model is
// present (time-inhomogeneous form) and c = 1 otherwise. Zero mean at every
// t is the martingale property of the generator pair.
std::vector<ResidualStat> martingale_residual(const std::vector<RcllPath>& paths,
                                              const ProcessSpec& spec, const TestFunction& f,
                                              const CoefficientModel* model,
                                              const std::vector<double>& tgrid,
                                              const MartingaleResidualOptions& opts = {});

}  // namespace tclab
