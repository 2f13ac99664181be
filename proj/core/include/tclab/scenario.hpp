#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tclab/coefficients.hpp"
#include "tclab/process.hpp"
#include "tclab/test_functions.hpp"

namespace tclab {

enum class CheckKind { Fp, Martingale, Spacetime, Pathwise, Uniqueness, Classify, Regularity };

const char* to_string(CheckKind kind);

struct MonteCarloSpec {
    std::size_t paths = 20000;
    double mesh = 0.0125;
    std::uint64_t master_seed = 1;
    double horizon_factor = 4.0;
    std::optional<double> em_step;  // default: min(grid spacing / 8, 0.005)
};

struct SpacetimeSpec {
    std::vector<double> s0_values;  // default {0, 0.3·t0, t0 + 1}
    std::optional<CutoffFunction> cutoff;  // default plateau over [0, 0.6·t0], off at 1.4·t0
};

struct Tolerances {
    double solver_tol = 1e-9;
    double snap_eps = 1e-8;
    int subgrid_factor = 4;
    double sigma_multiplier = 3.0;
    double ks_alpha = 0.01;
    double divergence_threshold = 1e8;
    double cauchy_tol = 1e-6;
    double exponent_margin = 0.02;
    double refinement_slack = 1e-8;          // pathwise: r <= 2 r_fine + slack
    double regularity_consistent_frac = 0.99;
};

// Declarative coefficient: named H and sigma_tilde presets plus t0. The
// preset parameters are kept for the config echo; build() produces the model.
struct CoefficientConfig {
    nlohmann::ordered_json h_preset;
    nlohmann::ordered_json sigma_tilde_preset;
    double t0 = 1.0;

    CoefficientModel build() const;
};

struct Scenario {
    std::string name;
    ProcessSpec process;
    CoefficientConfig coefficient;
    std::vector<TestFunction> dictionary;
    std::vector<double> tgrid;
    MonteCarloSpec monte_carlo;
    std::vector<CheckKind> checks;
    Tolerances tolerances;
    SpacetimeSpec spacetime;
    nlohmann::ordered_json echo;  // the validated config, as parsed
    std::string raw_text;         // exact file contents, for content hashing
};

// Parses and validates a scenario config. Unknown fields anywhere are
// rejected with the offending key in the message.
Scenario parse_scenario(const nlohmann::ordered_json& config, std::string raw_text = "");
Scenario load_scenario_file(const std::string& path);

// Applies "key=value,key=value" overrides to the tolerance block.
void apply_tolerance_overrides(Tolerances& tol, const std::string& overrides);

}  // namespace tclab
