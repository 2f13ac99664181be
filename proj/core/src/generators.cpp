#include "tclab/generators.hpp"

#include <algorithm>
#include <cmath>

#include "tclab/errors.hpp"
#include "tclab/stats.hpp"

namespace tclab {

namespace {

constexpr double kStateTol = 1e-12;

double ctmc_generator(const Ctmc& chain, const TestFunction& f, double x) {
    std::size_t idx = chain.states.size();
    for (std::size_t j = 0; j < chain.states.size(); ++j) {
        if (std::fabs(chain.states[j] - x) <= kStateTol) {
            idx = j;
            break;
        }
    }
    if (idx == chain.states.size())
        throw InvalidArgument("apply_generator: x=" + std::to_string(x) + " is not a chain state");
    double acc = 0.0;
    for (std::size_t j = 0; j < chain.states.size(); ++j)
        acc += chain.rate_matrix[idx][j] * f.value(chain.states[j]);
    return acc;
}

}  // namespace

double apply_generator(const ProcessSpec& spec, const TestFunction& f, double x) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BrownianMotion>) {
                return 0.5 * f.d2(x);
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                double acc = 0.0;
                for (const auto& atom : v.jump_law) acc += atom.probability * (f.value(x + atom.value) - f.value(x));
                return v.rate * acc;
            } else {
                return ctmc_generator(v, f, x);
            }
        },
        spec.variant);
}

std::vector<ResidualStat> martingale_residual(const std::vector<RcllPath>& paths,
                                              const ProcessSpec& spec, const TestFunction& f,
                                              const CoefficientModel* model,
                                              const std::vector<double>& tgrid,
                                              const MartingaleResidualOptions& opts) {
    if (paths.empty()) throw InvalidArgument("martingale_residual: empty path list");
    if (tgrid.empty()) throw InvalidArgument("martingale_residual: empty tgrid");
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        if (!(tgrid[k] > tgrid[k - 1])) throw InvalidArgument("martingale_residual: tgrid not increasing");
    }
    const double t_max = tgrid.back();
    for (const auto& p : paths) {
        if (p.horizon() < t_max) throw OutOfRange("martingale_residual: tgrid exceeds a path horizon");
    }

    // Subgrid containing tgrid, with step <= (min tgrid spacing) / factor.
    double min_spacing = t_max;
    double prev = tgrid.front();
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        min_spacing = std::min(min_spacing, tgrid[k] - prev);
        prev = tgrid[k];
    }
    const double target_step = min_spacing / std::max(1, opts.subgrid_factor);
    std::vector<double> subgrid{tgrid.front()};
    std::vector<std::size_t> grid_pos{0};  // index of each tgrid point in the subgrid
    for (std::size_t k = 1; k < tgrid.size(); ++k) {
        const double a = tgrid[k - 1];
        const double b = tgrid[k];
        const auto pieces = static_cast<std::size_t>(std::ceil((b - a) / target_step - 1e-12));
        for (std::size_t j = 1; j < pieces; ++j)
            subgrid.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(pieces));
        subgrid.push_back(b);
        grid_pos.push_back(subgrid.size() - 1);
    }

    const std::size_t n_paths = paths.size();
    const std::size_t n_grid = tgrid.size();
    // Per grid time, the martingale expression per path.
    std::vector<std::vector<double>> residuals(n_grid, std::vector<double>(n_paths));

    std::vector<double> integrand(subgrid.size());
    for (std::size_t i = 0; i < n_paths; ++i) {
        const auto& path = paths[i];
        std::vector<double> values(subgrid.size());
        for (std::size_t j = 0; j < subgrid.size(); ++j)
            values[j] = path.evaluate_snapped(subgrid[j], opts.snap_eps);
        for (std::size_t j = 0; j < subgrid.size(); ++j) {
            const double af = apply_generator(spec, f, values[j]);
            integrand[j] = (model != nullptr) ? model->sigma(subgrid[j], values[j]) * af : af;
        }
        const double f0 = f.value(values[0]);
        double integral = 0.0;
        std::size_t next_grid = 0;
        for (std::size_t j = 0; j < subgrid.size(); ++j) {
            if (j > 0)
                integral += 0.5 * (integrand[j] + integrand[j - 1]) * (subgrid[j] - subgrid[j - 1]);
            if (next_grid < n_grid && grid_pos[next_grid] == j) {
                residuals[next_grid][i] = f.value(values[j]) - f0 - integral;
                ++next_grid;
            }
        }
    }

    std::vector<ResidualStat> out(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
        out[k].t = tgrid[k];
        if (n_paths >= 2) {
            const auto stats = summary_stats(residuals[k]);
            out[k].mean = stats.mean;
            out[k].standard_error = stats.standard_error;
        } else {
            out[k].mean = residuals[k][0];
            out[k].standard_error = 0.0;
        }
    }
    return out;
}

}  // namespace tclab
