#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "tclab/rcll_path.hpp"
#include "tclab/rng.hpp"

namespace tclab {

struct BrownianMotion {
    double x0 = 0.0;
};

struct JumpAtom {
    double value = 0.0;
    double probability = 0.0;
};

struct CompoundPoisson {
    double x0 = 0.0;
    double rate = 1.0;
    std::vector<JumpAtom> jump_law;
};

struct Ctmc {
    std::vector<double> states;               // distinct reals, the embedded state space
    std::vector<std::vector<double>> rate_matrix;  // off-diagonal >= 0, rows sum to 0
    std::size_t initial_state_index = 0;
};

// Base Markov process to be simulated exactly (jump processes) or on a mesh
// (Brownian motion).
struct ProcessSpec {
    std::variant<BrownianMotion, CompoundPoisson, Ctmc> variant;

    // Throws InvalidArgument on any violated invariant.
    void validate() const;

    double initial_state() const;
    bool is_brownian() const { return std::holds_alternative<BrownianMotion>(variant); }
    bool is_discrete_state() const { return std::holds_alternative<Ctmc>(variant); }
};

// Samples one trajectory on [0, horizon]. For Brownian motion the grid is
// the multiples of mesh (horizon is rounded up to a whole number of cells by
// the caller contract below); jump processes ignore mesh and store exact
// event times. Deterministic given (spec, horizon, mesh, rng state).
RcllPath sample_path(const ProcessSpec& spec, double horizon, double mesh, CounterRng& rng);

// Convenience overload seeding a fresh counter-based stream.
RcllPath sample_path(const ProcessSpec& spec, double horizon, double mesh, std::uint64_t seed);

}  // namespace tclab
