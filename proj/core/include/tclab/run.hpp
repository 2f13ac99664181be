#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tclab/scenario.hpp"

namespace tclab {

enum class Verdict { Pass, Fail, Inconclusive, Skipped };

const char* to_string(Verdict v);

struct CheckResult {
    CheckKind kind;
    Verdict verdict = Verdict::Skipped;
    std::string detail;
    std::vector<std::string> artifacts;
    double wall_ms = 0.0;
};

struct RunReport {
    std::string scenario_name;
    std::string scenario_hash;  // git-style blob hash of the config file
    std::string version;
    std::uint64_t master_seed = 0;
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;  // shared outputs (ensemble, sample paths)
    int workers = 1;
    double total_ms = 0.0;

    bool any_fail() const;
    // Timing fields (and the worker count) live in a single "timings"
    // object; everything else is reproducible byte for byte.
    nlohmann::ordered_json to_json() const;
};

struct RunOptions {
    int workers = 1;
    // Force this check list instead of the scenario's.
    std::optional<std::vector<CheckKind>> check_override;
    // Replace the simulated ensemble by an imported CSV (provenance external).
    std::optional<std::string> import_ensemble;
    // Write the ensemble artifacts even when no check needs them.
    bool force_simulate = false;
    // Export the first k base paths as path_<i>.csv.
    int dump_paths = 0;
    // Cap on per-path checks (pathwise residuals, regularity probes).
    std::size_t per_path_cap = 1000;
};

// Executes the requested checks in dependency order, writes CSV artifacts
// and report.json under out_dir, and returns the consolidated verdicts.
RunReport run_scenario(const Scenario& scenario, const std::string& out_dir,
                       const RunOptions& opts = {});

}  // namespace tclab
