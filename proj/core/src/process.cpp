#include "tclab/process.hpp"

#include <cmath>
#include <string>

#include "tclab/errors.hpp"

namespace tclab {

namespace {

constexpr double kProbTol = 1e-12;

void validate_brownian(const BrownianMotion& bm) {
    if (!std::isfinite(bm.x0)) throw InvalidArgument("BrownianMotion: non-finite x0");
}

void validate_compound_poisson(const CompoundPoisson& cp) {
    if (!std::isfinite(cp.x0)) throw InvalidArgument("CompoundPoisson: non-finite x0");
    if (!(cp.rate > 0.0)) throw InvalidArgument("CompoundPoisson: rate must be positive");
    if (cp.jump_law.empty()) throw InvalidArgument("CompoundPoisson: empty jump law");
    double mass = 0.0;
    for (const auto& atom : cp.jump_law) {
        if (!(atom.probability >= 0.0)) throw InvalidArgument("CompoundPoisson: negative atom probability");
        if (!std::isfinite(atom.value)) throw InvalidArgument("CompoundPoisson: non-finite atom value");
        mass += atom.probability;
    }
    if (std::fabs(mass - 1.0) > kProbTol)
        throw InvalidArgument("CompoundPoisson: jump probabilities sum to " + std::to_string(mass));
}

void validate_ctmc(const Ctmc& chain) {
    const std::size_t n = chain.states.size();
    if (n == 0) throw InvalidArgument("Ctmc: empty state list");
    if (chain.initial_state_index >= n) throw InvalidArgument("Ctmc: initial state index out of range");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (chain.states[i] == chain.states[j])
                throw InvalidArgument("Ctmc: duplicate embedded state value");
        }
    }
    if (chain.rate_matrix.size() != n) throw InvalidArgument("Ctmc: rate matrix row count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (chain.rate_matrix[i].size() != n)
            throw InvalidArgument("Ctmc: rate matrix column count mismatch");
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double q = chain.rate_matrix[i][j];
            if (i != j && !(q >= 0.0)) throw InvalidArgument("Ctmc: negative off-diagonal rate");
            row_sum += q;
        }
        if (std::fabs(row_sum) > kProbTol)
            throw InvalidArgument("Ctmc: row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
    }
}

RcllPath sample_brownian(const BrownianMotion& bm, double horizon, double mesh, CounterRng& rng) {
    const auto cells = static_cast<std::size_t>(std::ceil(horizon / mesh - 1e-12));
    std::vector<double> times(cells + 1);
    std::vector<double> values(cells + 1);
    times[0] = 0.0;
    values[0] = bm.x0;
    double x = bm.x0;
    for (std::size_t k = 1; k <= cells; ++k) {
        const double t_prev = static_cast<double>(k - 1) * mesh;
        const double t_here = std::min(static_cast<double>(k) * mesh, horizon);
        x += std::sqrt(t_here - t_prev) * rng.next_gaussian();
        times[k] = t_here;
        values[k] = x;
    }
    return RcllPath(std::move(times), std::move(values), horizon, PathKind::MeshSampled);
}

RcllPath sample_compound_poisson(const CompoundPoisson& cp, double horizon, CounterRng& rng) {
    std::vector<double> times{0.0};
    std::vector<double> values{cp.x0};
    double t = 0.0;
    double x = cp.x0;
    for (;;) {
        t += rng.next_exponential(cp.rate);
        if (t > horizon) break;
        const double u = rng.next_double();
        double cumulative = 0.0;
        double jump = cp.jump_law.back().value;
        for (const auto& atom : cp.jump_law) {
            cumulative += atom.probability;
            if (u < cumulative) {
                jump = atom.value;
                break;
            }
        }
        x += jump;
        times.push_back(t);
        values.push_back(x);
    }
    return RcllPath(std::move(times), std::move(values), horizon, PathKind::PiecewiseConstant);
}

RcllPath sample_ctmc(const Ctmc& chain, double horizon, CounterRng& rng) {
    std::vector<double> times{0.0};
    std::vector<double> values{chain.states[chain.initial_state_index]};
    std::size_t state = chain.initial_state_index;
    double t = 0.0;
    for (;;) {
        double escape = 0.0;
        for (std::size_t j = 0; j < chain.states.size(); ++j) {
            if (j != state) escape += chain.rate_matrix[state][j];
        }
        if (escape <= 0.0) break;  // absorbing state
        t += rng.next_exponential(escape);
        if (t > horizon) break;
        const double u = rng.next_double() * escape;
        double cumulative = 0.0;
        std::size_t next = state;
        for (std::size_t j = 0; j < chain.states.size(); ++j) {
            if (j == state) continue;
            cumulative += chain.rate_matrix[state][j];
            if (u < cumulative) {
                next = j;
                break;
            }
        }
        state = next;
        times.push_back(t);
        values.push_back(chain.states[state]);
    }
    return RcllPath(std::move(times), std::move(values), horizon, PathKind::PiecewiseConstant);
}

}  // namespace

void ProcessSpec::validate() const {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BrownianMotion>) validate_brownian(v);
            if constexpr (std::is_same_v<T, CompoundPoisson>) validate_compound_poisson(v);
            if constexpr (std::is_same_v<T, Ctmc>) validate_ctmc(v);
        },
        variant);
}

double ProcessSpec::initial_state() const {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BrownianMotion>) return v.x0;
            if constexpr (std::is_same_v<T, CompoundPoisson>) return v.x0;
            if constexpr (std::is_same_v<T, Ctmc>) return v.states[v.initial_state_index];
        },
        variant);
}

RcllPath sample_path(const ProcessSpec& spec, double horizon, double mesh, CounterRng& rng) {
    if (!(horizon > 0.0)) throw InvalidArgument("sample_path: horizon must be positive");
    if (!(mesh > 0.0)) throw InvalidArgument("sample_path: mesh must be positive");
    if (mesh > horizon) throw InvalidArgument("sample_path: mesh exceeds horizon");
    spec.validate();
    return std::visit(
        [&](const auto& v) -> RcllPath {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BrownianMotion>) return sample_brownian(v, horizon, mesh, rng);
            if constexpr (std::is_same_v<T, CompoundPoisson>) return sample_compound_poisson(v, horizon, rng);
            if constexpr (std::is_same_v<T, Ctmc>) return sample_ctmc(v, horizon, rng);
        },
        spec.variant);
}

RcllPath sample_path(const ProcessSpec& spec, double horizon, double mesh, std::uint64_t seed) {
    CounterRng rng(seed);
    return sample_path(spec, horizon, mesh, rng);
}

}  // namespace tclab
