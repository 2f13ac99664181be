#include "tclab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tclab/errors.hpp"
#include "tclab/version.hpp"

namespace tclab {

namespace {

using json = nlohmann::ordered_json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (allowed.find(key) == allowed.end())
            throw ConfigError(where + ": unknown field '" + key + "'");
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

ProcessSpec parse_process(const json& p) {
    const std::string where = "process";
    if (!p.is_object() || !p.contains("kind")) throw ConfigError(where + ": missing 'kind'");
    const std::string kind = p.at("kind").get<std::string>();
    ProcessSpec spec;
    if (kind == "brownian") {
        require_keys(p, where, {"kind", "x0"}, {"x0"});
        spec.variant = BrownianMotion{get_number(p, where, "x0")};
    } else if (kind == "compound_poisson") {
        require_keys(p, where, {"kind", "x0", "rate", "jump_law"}, {"x0", "rate", "jump_law"});
        CompoundPoisson cp;
        cp.x0 = get_number(p, where, "x0");
        cp.rate = get_number(p, where, "rate");
        for (const auto& atom : p.at("jump_law")) {
            require_keys(atom, where + ".jump_law[]", {"value", "probability"}, {"value", "probability"});
            cp.jump_law.push_back({atom.at("value").get<double>(), atom.at("probability").get<double>()});
        }
        spec.variant = std::move(cp);
    } else if (kind == "ctmc") {
        require_keys(p, where, {"kind", "states", "rate_matrix", "initial_state_index"},
                     {"states", "rate_matrix", "initial_state_index"});
        Ctmc chain;
        chain.states = p.at("states").get<std::vector<double>>();
        chain.rate_matrix = p.at("rate_matrix").get<std::vector<std::vector<double>>>();
        chain.initial_state_index = p.at("initial_state_index").get<std::size_t>();
        spec.variant = std::move(chain);
    } else {
        throw ConfigError(where + ": unknown kind '" + kind + "'");
    }
    spec.validate();
    return spec;
}

std::vector<TestFunction> parse_dictionary(const json& d) {
    if (d.is_string()) {
        if (d.get<std::string>() == "default8") return default_dictionary();
        throw ConfigError("dictionary: unknown preset '" + d.get<std::string>() + "'");
    }
    if (!d.is_array() || d.empty()) throw ConfigError("dictionary: expected 'default8' or a non-empty list");
    std::vector<TestFunction> out;
    for (const auto& entry : d) {
        if (!entry.is_object() || !entry.contains("family"))
            throw ConfigError("dictionary[]: missing 'family'");
        const std::string family = entry.at("family").get<std::string>();
        if (family == "bump") {
            require_keys(entry, "dictionary[]", {"family", "center", "radius"}, {"center", "radius"});
            out.push_back(TestFunction::bump(entry.at("center").get<double>(),
                                             entry.at("radius").get<double>()));
        } else if (family == "gauss_poly") {
            require_keys(entry, "dictionary[]", {"family", "degree", "scale"}, {"degree", "scale"});
            out.push_back(TestFunction::gauss_poly(entry.at("degree").get<int>(),
                                                   entry.at("scale").get<double>()));
        } else {
            throw ConfigError("dictionary[]: unknown family '" + family + "'");
        }
    }
    return out;
}

CheckKind parse_check(const std::string& name) {
    if (name == "fp") return CheckKind::Fp;
    if (name == "martingale") return CheckKind::Martingale;
    if (name == "spacetime") return CheckKind::Spacetime;
    if (name == "pathwise") return CheckKind::Pathwise;
    if (name == "uniqueness") return CheckKind::Uniqueness;
    if (name == "classify") return CheckKind::Classify;
    if (name == "regularity") return CheckKind::Regularity;
    throw ConfigError("checks: unknown check '" + name + "'");
}

}  // namespace

const char* to_string(CheckKind kind) {
    switch (kind) {
        case CheckKind::Fp: return "fp";
        case CheckKind::Martingale: return "martingale";
        case CheckKind::Spacetime: return "spacetime";
        case CheckKind::Pathwise: return "pathwise";
        case CheckKind::Uniqueness: return "uniqueness";
        case CheckKind::Classify: return "classify";
        default: return "regularity";
    }
}

CoefficientModel CoefficientConfig::build() const {
    const json& h = h_preset;
    const json& st = sigma_tilde_preset;

    std::function<double(double)> h_fn;
    std::vector<ZeroPoint> zeros;
    const std::string h_kind = h.at("preset").get<std::string>();
    if (h_kind == "constant") {
        require_keys(h, "coefficient.H", {"preset", "value"}, {"value"});
        const double v = h.at("value").get<double>();
        if (!(v > 0.0)) throw ConfigError("coefficient.H: constant must be positive (use power_law for zeros)");
        h_fn = [v](double) { return v; };
    } else if (h_kind == "power_law") {
        require_keys(h, "coefficient.H", {"preset", "exponent", "center"}, {"exponent", "center"});
        const double p = h.at("exponent").get<double>();
        const double c = h.at("center").get<double>();
        if (!(p > 0.0)) throw ConfigError("coefficient.H: power_law exponent must be positive");
        h_fn = [p, c](double x) { return std::pow(std::fabs(x - c), p); };
        zeros.push_back({c, p});
    } else if (h_kind == "sin_offset") {
        require_keys(h, "coefficient.H", {"preset", "offset"}, {"offset"});
        const double a = h.at("offset").get<double>();
        if (!(a > 1.0)) throw ConfigError("coefficient.H: sin_offset needs offset > 1 to stay zero-free");
        h_fn = [a](double x) { return a + std::sin(x); };
    } else {
        throw ConfigError("coefficient.H: unknown preset '" + h_kind + "'");
    }

    std::function<double(double, double)> st_fn;
    const std::string st_kind = st.at("preset").get<std::string>();
    if (st_kind == "constant") {
        require_keys(st, "coefficient.sigma_tilde", {"preset", "value"}, {"value"});
        const double v = st.at("value").get<double>();
        if (!(v > 0.0)) throw ConfigError("coefficient.sigma_tilde: constant must be positive");
        st_fn = [v](double, double) { return v; };
    } else if (st_kind == "linear_t") {
        require_keys(st, "coefficient.sigma_tilde", {"preset", "rate"}, {"rate"});
        const double r = st.at("rate").get<double>();
        if (!(1.0 + r * t0 > 0.0))
            throw ConfigError("coefficient.sigma_tilde: 1 + rate*t0 must stay positive");
        st_fn = [r](double t, double) { return 1.0 + r * t; };
    } else {
        throw ConfigError("coefficient.sigma_tilde: unknown preset '" + st_kind + "'");
    }

    return CoefficientModel(std::move(h_fn), std::move(st_fn), t0, std::move(zeros));
}

Scenario parse_scenario(const json& config, std::string raw_text) {
    require_keys(config, "scenario",
                 {"schema", "name", "process", "coefficient", "dictionary", "tgrid", "monte_carlo",
                  "checks", "tolerances", "spacetime"},
                 {"schema", "name", "process", "coefficient", "tgrid", "monte_carlo", "checks"});
    if (config.at("schema").get<int>() != kConfigSchemaVersion)
        throw ConfigError("scenario: unsupported schema version");

    Scenario sc;
    sc.raw_text = std::move(raw_text);
    sc.echo = config;
    sc.name = config.at("name").get<std::string>();
    if (sc.name.empty()) throw ConfigError("scenario: empty name");
    sc.process = parse_process(config.at("process"));

    const json& coef = config.at("coefficient");
    require_keys(coef, "coefficient", {"t0", "H", "sigma_tilde"}, {"t0", "H", "sigma_tilde"});
    sc.coefficient.t0 = get_number(coef, "coefficient", "t0");
    if (!(sc.coefficient.t0 > 0.0)) throw ConfigError("coefficient.t0: must be positive");
    sc.coefficient.h_preset = coef.at("H");
    sc.coefficient.sigma_tilde_preset = coef.at("sigma_tilde");
    const CoefficientModel model = sc.coefficient.build();  // validates the presets

    sc.dictionary = config.contains("dictionary") ? parse_dictionary(config.at("dictionary"))
                                                  : default_dictionary();

    const json& tg = config.at("tgrid");
    require_keys(tg, "tgrid", {"points", "t_end"}, {"points"});
    const int points = tg.at("points").get<int>();
    if (points < 2) throw ConfigError("tgrid.points: need at least 2");
    double t_end = tg.contains("t_end") ? get_number(tg, "tgrid", "t_end") : sc.coefficient.t0;
    if (!(t_end > 0.0) || t_end > sc.coefficient.t0 + 1e-12)
        throw ConfigError("tgrid.t_end: must lie in (0, t0]");
    // The plain grid may end at t0 itself only when the sigma_tilde bounds
    // hold there; otherwise back off by t0/1000.
    if (t_end == sc.coefficient.t0) {
        const double x0 = sc.process.initial_state();
        bool ok = true;
        for (int j = 0; j < 32; ++j) {
            const double x = x0 - 8.0 + 16.0 * j / 31.0;
            const double v = model.sigma_tilde(sc.coefficient.t0, x);
            if (!std::isfinite(v) || !(v > 0.0)) ok = false;
        }
        if (!ok) t_end = sc.coefficient.t0 * (1.0 - 1.0 / 1000.0);
    }
    sc.tgrid.resize(points);
    for (int k = 0; k < points; ++k) sc.tgrid[k] = t_end * k / (points - 1);
    sc.tgrid[0] = 0.0;

    const json& mc = config.at("monte_carlo");
    require_keys(mc, "monte_carlo", {"paths", "mesh", "master_seed", "horizon_factor", "em_step"},
                 {"paths", "mesh", "master_seed"});
    sc.monte_carlo.paths = mc.at("paths").get<std::size_t>();
    if (sc.monte_carlo.paths < 100) throw ConfigError("monte_carlo.paths: need at least 100");
    sc.monte_carlo.mesh = get_number(mc, "monte_carlo", "mesh");
    if (!(sc.monte_carlo.mesh > 1e-6)) throw ConfigError("monte_carlo.mesh: must exceed 1e-6");
    sc.monte_carlo.master_seed = mc.at("master_seed").get<std::uint64_t>();
    if (mc.contains("horizon_factor"))
        sc.monte_carlo.horizon_factor = get_number(mc, "monte_carlo", "horizon_factor");
    if (mc.contains("em_step")) sc.monte_carlo.em_step = get_number(mc, "monte_carlo", "em_step");

    for (const auto& c : config.at("checks")) sc.checks.push_back(parse_check(c.get<std::string>()));

    if (config.contains("tolerances")) {
        const json& tol = config.at("tolerances");
        require_keys(tol, "tolerances",
                     {"solver_tol", "snap_eps", "subgrid_factor", "sigma_multiplier", "ks_alpha",
                      "divergence_threshold", "cauchy_tol", "exponent_margin", "refinement_slack",
                      "regularity_consistent_frac"},
                     {});
        auto& t = sc.tolerances;
        if (tol.contains("solver_tol")) t.solver_tol = tol.at("solver_tol").get<double>();
        if (tol.contains("snap_eps")) t.snap_eps = tol.at("snap_eps").get<double>();
        if (tol.contains("subgrid_factor")) t.subgrid_factor = tol.at("subgrid_factor").get<int>();
        if (tol.contains("sigma_multiplier")) t.sigma_multiplier = tol.at("sigma_multiplier").get<double>();
        if (tol.contains("ks_alpha")) t.ks_alpha = tol.at("ks_alpha").get<double>();
        if (tol.contains("divergence_threshold"))
            t.divergence_threshold = tol.at("divergence_threshold").get<double>();
        if (tol.contains("cauchy_tol")) t.cauchy_tol = tol.at("cauchy_tol").get<double>();
        if (tol.contains("exponent_margin")) t.exponent_margin = tol.at("exponent_margin").get<double>();
        if (tol.contains("refinement_slack")) t.refinement_slack = tol.at("refinement_slack").get<double>();
        if (tol.contains("regularity_consistent_frac"))
            t.regularity_consistent_frac = tol.at("regularity_consistent_frac").get<double>();
    }

    const double t0 = sc.coefficient.t0;
    sc.spacetime.s0_values = {0.0, 0.3 * t0, t0 + 1.0};
    if (config.contains("spacetime")) {
        const json& st = config.at("spacetime");
        require_keys(st, "spacetime", {"s0_values", "cutoff"}, {});
        if (st.contains("s0_values")) sc.spacetime.s0_values = st.at("s0_values").get<std::vector<double>>();
        if (st.contains("cutoff")) {
            const json& cut = st.at("cutoff");
            require_keys(cut, "spacetime.cutoff", {"t_on", "t_plateau_end", "t_off"},
                         {"t_on", "t_plateau_end", "t_off"});
            sc.spacetime.cutoff = CutoffFunction(cut.at("t_on").get<double>(),
                                                 cut.at("t_plateau_end").get<double>(),
                                                 cut.at("t_off").get<double>());
        }
    }
    if (!sc.spacetime.cutoff) sc.spacetime.cutoff = CutoffFunction(0.0, 0.6 * t0, 1.4 * t0);

    // Sampled model sanity around the start state.
    const double x0 = sc.process.initial_state();
    model.probe_h_nonnegative(x0 - 25.0, x0 + 25.0, 1000);
    model.probe_sigma_tilde_positive(x0 - 10.0, x0 + 10.0, 50);

    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    json config;
    try {
        config = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError("scenario parse error in " + path + ": " + e.what());
    }
    return parse_scenario(config, text);
}

void apply_tolerance_overrides(Tolerances& tol, const std::string& overrides) {
    if (overrides.empty()) return;
    std::stringstream ss(overrides);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--tol: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (key == "solver_tol") tol.solver_tol = value;
        else if (key == "snap_eps") tol.snap_eps = value;
        else if (key == "subgrid_factor") tol.subgrid_factor = static_cast<int>(value);
        else if (key == "sigma_multiplier") tol.sigma_multiplier = value;
        else if (key == "ks_alpha") tol.ks_alpha = value;
        else if (key == "divergence_threshold") tol.divergence_threshold = value;
        else if (key == "cauchy_tol") tol.cauchy_tol = value;
        else if (key == "exponent_margin") tol.exponent_margin = value;
        else if (key == "refinement_slack") tol.refinement_slack = value;
        else if (key == "regularity_consistent_frac") tol.regularity_consistent_frac = value;
        else throw ConfigError("--tol: unknown key '" + key + "'");
    }
}

}  // namespace tclab
