#include "conjresp/scenario.hpp"

#include "conjresp/errors.hpp"

#include <fstream>
#include <set>

namespace conjresp {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

template <class T>
T get_as(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": missing or of the wrong type");
    }
}

template <class T>
void read_optional(const json& obj, const char* key, const std::string& where, T& out) {
    if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

std::vector<double> read_t_values(const json& obj, const char* key, const std::string& where) {
    auto t = get_as<std::vector<double>>(obj, key, where);
    if (t.empty()) throw ConfigError(where + "." + key + ": t list must not be empty");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) throw ConfigError(where + "." + key + ": t values must be positive");
        if (i > 0 && !(t[i] < t[i - 1]))
            throw ConfigError(where + "." + key + ": t values must be strictly decreasing");
    }
    return t;
}

MapSpec parse_map(const json& j, int dim) {
    const std::string where = "map";
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("map: needs a \"kind\"");
    const auto kind = get_as<std::string>(j, "kind", where);
    MapSpec spec;
    if (kind == "linear") {
        reject_unknown(j, where, {"kind", "A"});
        spec.kind = TorusMap::Family::linear;
        spec.a = get_as<std::vector<std::vector<int>>>(j, "A", where);
    } else if (kind == "warped_doubling") {
        reject_unknown(j, where, {"kind", "generator_modes"});
        if (dim != 1) throw ConfigError("map: warped_doubling lives on T^1");
        spec.kind = TorusMap::Family::warped_doubling;
        spec.generator_modes = parse_modes(j.at("generator_modes"), 1, "map.generator_modes");
    } else if (kind == "custom") {
        reject_unknown(j, where, {"kind", "A", "displacement_modes", "density_modes"});
        spec.kind = TorusMap::Family::custom;
        spec.a = get_as<std::vector<std::vector<int>>>(j, "A", where);
        if (j.contains("displacement_modes")) {
            const json& d = j.at("displacement_modes");
            if (!d.is_array() || static_cast<int>(d.size()) != dim)
                throw ConfigError("map.displacement_modes: one mode list per component expected");
            for (const auto& comp : d) spec.displacement.push_back(parse_modes(comp, dim, "map.displacement_modes"));
        }
        if (j.contains("density_modes")) spec.density_modes = parse_modes(j.at("density_modes"), dim, "map.density_modes");
    } else {
        throw ConfigError("map.kind: unknown map kind \"" + kind + "\"");
    }
    const auto n = static_cast<std::size_t>(dim);
    if (spec.kind != TorusMap::Family::warped_doubling) {
        if (spec.a.size() != n) throw ConfigError("map.A: must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
        for (const auto& row : spec.a)
            if (row.size() != n)
                throw ConfigError("map.A: must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    }
    return spec;
}

}  // namespace

std::vector<Mode> parse_modes(const json& list, int dim, const std::string& where) {
    if (!list.is_array()) throw ConfigError(where + ": expected a list of modes");
    std::vector<Mode> modes;
    for (const auto& entry : list) {
        if (!entry.is_array() || static_cast<int>(entry.size()) != dim + 2)
            throw ConfigError(where + ": each mode is [k_1.." + std::string(dim == 2 ? "k_2" : "k_1") +
                              ", re, im]");
        Mode m;
        for (int a = 0; a < dim; ++a) {
            const json& k = entry[static_cast<std::size_t>(a)];
            if (!k.is_number_integer()) throw ConfigError(where + ": wave numbers must be integers");
            m.k[static_cast<std::size_t>(a)] = k.get<int>();
        }
        const json& re = entry[static_cast<std::size_t>(dim)];
        const json& im = entry[static_cast<std::size_t>(dim + 1)];
        if (!re.is_number() || !im.is_number()) throw ConfigError(where + ": mode amplitudes must be numbers");
        m.c = Complex(re.get<double>(), im.get<double>());
        modes.push_back(m);
    }
    return modes;
}

SolutionStrategy parse_strategy(const json& j, int dim) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "canonical") return SolutionStrategy::canonical();
        if (s == "gradient") return SolutionStrategy::gradient();
        throw ConfigError("strategy: unknown strategy \"" + s + "\"");
    }
    reject_unknown(j, "strategy", {"custom"});
    if (!j.contains("custom")) throw ConfigError("strategy: expected \"canonical\", \"gradient\" or {\"custom\": ...}");
    const json& c = j.at("custom");
    reject_unknown(c, "strategy.custom", {"harmonic", "alpha_modes"});
    SolutionStrategy s = SolutionStrategy::custom({});
    if (c.contains("harmonic")) {
        s.harmonic = get_as<std::vector<double>>(c, "harmonic", "strategy.custom");
        if (static_cast<int>(s.harmonic.size()) != dim)
            throw ConfigError("strategy.custom.harmonic: needs " + std::to_string(dim) + " coefficient(s)");
    }
    if (c.contains("alpha_modes")) {
        if (dim != 2) throw ConfigError("strategy.custom.alpha_modes: only defined on T^2");
        s.alpha_modes = parse_modes(c.at("alpha_modes"), dim, "strategy.custom.alpha_modes");
    }
    return s;
}

Scenario parse_scenario(const json& config) {
    reject_unknown(config, "config", {"grid", "map", "rho", "strategy", "flow", "verify", "moser", "sweep", "output"});
    Scenario s;

    if (!config.contains("grid")) throw ConfigError("config: missing \"grid\" section");
    const json& grid = config.at("grid");
    reject_unknown(grid, "grid", {"dim", "resolution"});
    s.dim = get_as<int>(grid, "dim", "grid");
    if (s.dim != 1 && s.dim != 2) throw ConfigError("grid.dim: must be 1 or 2");
    auto res = get_as<std::vector<int>>(grid, "resolution", "grid");
    if (static_cast<int>(res.size()) != s.dim) throw ConfigError("grid.resolution: one entry per axis");
    s.resolution = {res[0], s.dim == 2 ? res[1] : 1};
    try {
        (void)s.grid();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    if (!config.contains("map")) throw ConfigError("config: missing \"map\" section");
    s.map = parse_map(config.at("map"), s.dim);

    if (config.contains("rho")) {
        const json& rho = config.at("rho");
        if (rho.is_array()) {
            s.rho_modes = parse_modes(rho, s.dim, "rho");
        } else {
            reject_unknown(rho, "rho", {"modes", "center"});
            s.rho_modes = parse_modes(rho.at("modes"), s.dim, "rho.modes");
            read_optional(rho, "center", "rho", s.center_rho);
        }
    }

    if (config.contains("strategy")) s.strategy = parse_strategy(config.at("strategy"), s.dim);

    if (config.contains("flow")) {
        const json& flow = config.at("flow");
        reject_unknown(flow, "flow", {"steps", "poisson_tol"});
        read_optional(flow, "steps", "flow", s.flow_steps);
        read_optional(flow, "poisson_tol", "flow", s.poisson_tol);
        if (s.flow_steps < 0) throw ConfigError("flow.steps: must be >= 0 (0 selects the default)");
        if (!(s.poisson_tol > 0.0)) throw ConfigError("flow.poisson_tol: must be positive");
    }

    if (config.contains("verify")) {
        const json& v = config.at("verify");
        reject_unknown(v, "verify", {"t_values", "derivative_t_values", "transfer_t", "transfer_resolution",
                                     "transfer_threshold", "base_transfer_threshold", "max_error"});
        if (v.contains("t_values")) s.verify.t_values = read_t_values(v, "t_values", "verify");
        if (v.contains("derivative_t_values"))
            s.verify.derivative_t_values = read_t_values(v, "derivative_t_values", "verify");
        read_optional(v, "transfer_t", "verify", s.verify.transfer_t);
        read_optional(v, "transfer_resolution", "verify", s.verify.transfer_resolution);
        read_optional(v, "transfer_threshold", "verify", s.verify.transfer_threshold);
        read_optional(v, "base_transfer_threshold", "verify", s.verify.base_transfer_threshold);
        read_optional(v, "max_error", "verify", s.verify.max_error);
        if (s.verify.transfer_resolution < 8) throw ConfigError("verify.transfer_resolution: must be >= 8");
    }

    if (config.contains("moser")) {
        const json& m = config.at("moser");
        reject_unknown(m, "moser", {"eta0_modes", "eta1_modes", "steps", "resolution", "threshold", "transfer",
                                    "transfer_resolution", "transfer_threshold"});
        if (m.contains("eta0_modes")) s.moser.eta0_modes = parse_modes(m.at("eta0_modes"), s.dim, "moser.eta0_modes");
        if (!m.contains("eta1_modes")) throw ConfigError("moser: missing \"eta1_modes\"");
        s.moser.eta1_modes = parse_modes(m.at("eta1_modes"), s.dim, "moser.eta1_modes");
        read_optional(m, "steps", "moser", s.moser.steps);
        read_optional(m, "resolution", "moser", s.moser.resolution);
        read_optional(m, "threshold", "moser", s.moser.threshold);
        read_optional(m, "transfer", "moser", s.moser.transfer);
        read_optional(m, "transfer_resolution", "moser", s.moser.transfer_resolution);
        read_optional(m, "transfer_threshold", "moser", s.moser.transfer_threshold);
        if (s.moser.steps < 1) throw ConfigError("moser.steps: must be >= 1");
    }

    if (config.contains("sweep")) {
        const json& w = config.at("sweep");
        reject_unknown(w, "sweep", {"t_values", "resolutions", "transfer"});
        s.sweep.t_values = read_t_values(w, "t_values", "sweep");
        read_optional(w, "resolutions", "sweep", s.sweep.resolutions);
        read_optional(w, "transfer", "sweep", s.sweep.transfer);
    }

    if (config.contains("output")) {
        const json& o = config.at("output");
        reject_unknown(o, "output", {"scenario_id"});
        read_optional(o, "scenario_id", "output", s.output.scenario_id);
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_scenario(j);
}

TorusMap build_map(const MapSpec& spec, const TorusGrid& grid) {
    switch (spec.kind) {
        case TorusMap::Family::linear:
            return make_linear(grid, spec.a);
        case TorusMap::Family::warped_doubling:
            return make_warped_doubling(VectorField({from_modes(grid, spec.generator_modes)}));
        case TorusMap::Family::custom: {
            IntMat a{};
            for (std::size_t i = 0; i < spec.a.size(); ++i)
                for (std::size_t j = 0; j < spec.a[i].size(); ++j) a[i][j] = spec.a[i][j];
            std::vector<ScalarField> disp;
            for (int c = 0; c < grid.dim(); ++c)
                disp.push_back(spec.displacement.empty()
                                   ? ScalarField::zero(grid)
                                   : from_modes(grid, spec.displacement[static_cast<std::size_t>(c)]));
            VolumeDensity density = spec.density_modes.empty()
                                        ? VolumeDensity::lebesgue(grid)
                                        : VolumeDensity(from_modes(grid, spec.density_modes));
            return make_custom(a, VectorField(std::move(disp)), density);
        }
    }
    throw ConfigError("map: unsupported kind");
}

Problem build_problem(const Scenario& scenario, const TorusGrid& grid) {
    TorusMap map = build_map(scenario.map, grid);
    ScalarField rho = from_modes(grid, scenario.rho_modes);
    if (scenario.center_rho) rho = add_constant(rho, -mean(product(rho, map.density().eta())));
    return {std::move(map), std::move(rho)};
}

}  // namespace conjresp
