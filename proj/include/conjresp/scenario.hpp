#pragma once

#include "conjresp/dynamics.hpp"
#include "conjresp/exactness.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace conjresp {

/// How to build the map for a given grid.
struct MapSpec {
    TorusMap::Family kind = TorusMap::Family::linear;
    std::vector<std::vector<int>> a;                 // linear, custom
    std::vector<Mode> generator_modes;               // warped_doubling
    std::vector<std::vector<Mode>> displacement;     // custom: one list per component
    std::vector<Mode> density_modes;                 // custom
};

struct VerifySettings {
    std::vector<double> t_values{1e-2, 5e-3, 2.5e-3};
    std::vector<double> derivative_t_values;  // empty: reuse t_values
    double transfer_t = 0.02;
    int transfer_resolution = 512;
    double transfer_threshold = 1e-4;
    double base_transfer_threshold = 1e-6;
    double max_error = 1e-4;  // response error at the smallest t
};

struct MoserSettings {
    std::vector<Mode> eta0_modes;  // empty: the map's invariant density
    std::vector<Mode> eta1_modes;
    int steps = 256;
    int resolution = 128;
    double threshold = 1e-6;
    bool transfer = true;
    int transfer_resolution = 512;
    double transfer_threshold = 1e-4;
};

struct SweepSettings {
    std::vector<double> t_values;
    std::vector<int> resolutions;  // empty: the grid resolution
    bool transfer = true;
};

struct OutputSettings {
    std::string scenario_id = "scenario";
};

/// A parsed run configuration. Every section except `grid` and `map` is
/// optional; unknown keys anywhere are rejected.
struct Scenario {
    int dim = 1;
    std::array<int, 2> resolution{64, 1};
    MapSpec map;
    std::vector<Mode> rho_modes;
    bool center_rho = false;
    SolutionStrategy strategy;
    double poisson_tol = 1e-10;
    int flow_steps = 0;
    VerifySettings verify;
    MoserSettings moser;
    SweepSettings sweep;
    OutputSettings output;

    TorusGrid grid() const { return TorusGrid(dim, resolution); }
};

/// Throws ConfigError naming the offending key.
Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario(const std::filesystem::path& path);

/// Mode list [[k_1..k_n, re, im], ...] for a dim-dimensional torus.
std::vector<Mode> parse_modes(const nlohmann::json& list, int dim, const std::string& where);
SolutionStrategy parse_strategy(const nlohmann::json& j, int dim);

/// Map, density and rho realised on a grid.
struct Problem {
    TorusMap map;
    ScalarField rho;
    const VolumeDensity& omega() const { return map.density(); }
};

Problem build_problem(const Scenario& scenario, const TorusGrid& grid);
TorusMap build_map(const MapSpec& spec, const TorusGrid& grid);

}  // namespace conjresp
