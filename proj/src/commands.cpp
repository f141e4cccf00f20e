#include "conjresp/commands.hpp"

#include "conjresp/errors.hpp"
#include "conjresp/io.hpp"
#include "conjresp/verify.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace conjresp::cli {

using nlohmann::json;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_field(const Options& opt, const std::string& stem, const ScalarField& f) {
    if (opt.format == Format::csv) {
        std::ostringstream os;
        io::write_field_csv(os, f);
        write_text(opt.out_dir / (stem + ".csv"), os.str());
    } else {
        write_json(opt.out_dir / (stem + ".json"), io::field_to_json(f));
    }
}

bool is_expanding_circle(const TorusMap& map) { return map.dim() == 1 && std::abs(map.degree()) >= 2; }

TorusGrid grid_at(int dim, int n) { return dim == 1 ? TorusGrid::line(n) : TorusGrid::square(n); }

std::string real(double v) { return std::isfinite(v) ? io::format_real(v) : "nan"; }

}  // namespace

int run_solve(const Scenario& scenario, const Options& options, std::ostream& log) {
    Problem p = build_problem(scenario, scenario.grid());
    FieldSolution sol = solve_for_field_detailed(p.rho, p.omega(), scenario.strategy, scenario.poisson_tol);

    for (int a = 0; a < sol.field.dim(); ++a) write_field(options, "X_" + std::to_string(a + 1), sol.field[a]);
    if (sol.theta)
        for (int a = 0; a < sol.theta->dim(); ++a)
            write_field(options, "theta_" + std::to_string(a + 1), (*sol.theta)[a]);
    if (sol.potential) write_field(options, "u", *sol.potential);

    const double relative = sol.scale > 0.0 ? sol.residual / sol.scale : 0.0;
    json summary{{"scenario_id", scenario.output.scenario_id},
                 {"map", family_name(p.map.family())},
                 {"certified", p.map.certified()},
                 {"residual", sol.residual},
                 {"relative_residual", relative},
                 {"max_rho_eta", sol.scale}};
    write_json(options.out_dir / "solve_summary.json", summary);
    if (!options.quiet)
        log << "solve " << scenario.output.scenario_id << ": max|div(eta X) + rho eta| = " << real(sol.residual)
            << " (relative " << real(relative) << ")\n";
    return kOk;
}

int run_verify(const Scenario& scenario, const Options& options, std::ostream& log, std::ostream& err) {
    Problem p = build_problem(scenario, scenario.grid());
    const VectorField x = solve_for_field_detailed(p.rho, p.omega(), scenario.strategy, scenario.poisson_tol).field;
    const auto& v = scenario.verify;

    ConvergenceReport response = response_check(p.omega(), p.rho, x, v.t_values, scenario.flow_steps);
    const bool response_ok = response.passed && response.error.back() <= v.max_error;
    ConvergenceReport deriv = derivative_check(
        p.map, x, v.derivative_t_values.empty() ? v.t_values : v.derivative_t_values, scenario.flow_steps);

    json report{{"scenario_id", scenario.output.scenario_id}};
    report["response"] = response.to_json();
    report["response"]["max_error"] = v.max_error;
    report["response"]["passed"] = response_ok;
    report["derivative"] = deriv.to_json();

    std::vector<std::string> failed;
    if (!response_ok) failed.push_back("response_check");
    if (!deriv.passed) failed.push_back("derivative_check");

    if (is_expanding_circle(p.map)) {
        DeformedMap base{p.map, x, 0.0, scenario.flow_steps};
        const double r0 = transfer_check(base, p.omega(), v.transfer_resolution);
        VolumeDensity eta_t = pushforward_density(p.omega(), x, v.transfer_t, scenario.flow_steps);
        DeformedMap deformed{p.map, x, v.transfer_t, scenario.flow_steps};
        const double rt = transfer_check(deformed, eta_t, v.transfer_resolution);
        const bool ok = r0 <= v.base_transfer_threshold && rt <= v.transfer_threshold;
        report["transfer"] = {{"resolution", v.transfer_resolution},
                              {"t", v.transfer_t},
                              {"residual_t0", r0},
                              {"residual", rt},
                              {"threshold_t0", v.base_transfer_threshold},
                              {"threshold", v.transfer_threshold},
                              {"passed", ok}};
        if (!ok) failed.push_back("transfer_check");
    }
    report["passed"] = failed.empty();
    report["failed"] = failed;
    write_json(options.out_dir / "verify_report.json", report);

    if (!options.quiet) {
        log << "response_check: " << response.note << ", error(t_min) = " << real(response.error.back())
            << (response_ok ? " PASS" : " FAIL") << "\n";
        log << "derivative_check: " << deriv.note << (deriv.passed ? " PASS" : " FAIL") << "\n";
        if (report.contains("transfer"))
            log << "transfer_check: residual(t=0) = " << real(report["transfer"]["residual_t0"].get<double>())
                << ", residual(t=" << v.transfer_t << ") = " << real(report["transfer"]["residual"].get<double>())
                << (report["transfer"]["passed"].get<bool>() ? " PASS" : " FAIL") << "\n";
    }
    if (!failed.empty()) {
        std::string names;
        for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
        err << "verification failed: " << names << "\n";
        return kVerification;
    }
    return kOk;
}

int run_moser(const Scenario& scenario, const Options& options, std::ostream& log, std::ostream& err) {
    const auto& m = scenario.moser;
    if (m.eta1_modes.empty()) throw ConfigError("moser: missing \"eta1_modes\"");
    const TorusGrid grid = grid_at(scenario.dim, m.resolution);
    TorusMap map = build_map(scenario.map, grid);
    const bool from_invariant = m.eta0_modes.empty();
    VolumeDensity eta0 = from_invariant ? map.density() : VolumeDensity(from_modes(grid, m.eta0_modes));
    VolumeDensity eta1(from_modes(grid, m.eta1_modes));

    MoserTransport psi(eta0, eta1, m.steps);
    const double residual = max_abs(psi.pushforward_density() - eta1.eta());
    json report{{"scenario_id", scenario.output.scenario_id},
                {"resolution", m.resolution},
                {"steps", m.steps},
                {"pushforward_residual", residual},
                {"threshold", m.threshold}};
    bool ok = residual <= m.threshold;
    if (m.transfer && from_invariant && is_expanding_circle(map)) {
        // psi T psi^{-1} is a covering conjugate to an expanding map, not necessarily expanding itself.
        const double tr = perron_frobenius_residual(MoserConjugateLift(map, psi), eta1.eta(), m.transfer_resolution,
                                                    kExpansionMargin);
        report["transfer_residual"] = tr;
        report["transfer_threshold"] = m.transfer_threshold;
        ok = ok && tr <= m.transfer_threshold;
    }
    report["passed"] = ok;
    write_json(options.out_dir / "moser_report.json", report);
    if (!options.quiet) {
        log << "moser: pushforward residual = " << real(residual);
        if (report.contains("transfer_residual"))
            log << ", conjugated map transfer residual = " << real(report["transfer_residual"].get<double>());
        log << (ok ? " PASS" : " FAIL") << "\n";
    }
    if (!ok) err << "moser transport failed: residual above threshold (see moser_report.json)\n";
    return ok ? kOk : kConvergence;
}

int run_sweep(const Scenario& scenario, const Options& options, std::ostream& log) {
    const std::vector<double>& ts = scenario.sweep.t_values.empty() ? scenario.verify.t_values
                                                                     : scenario.sweep.t_values;
    if (ts.empty()) throw ConfigError("sweep.t_values: t list must not be empty");
    std::vector<int> resolutions = scenario.sweep.resolutions;
    if (resolutions.empty()) resolutions.push_back(scenario.resolution[0]);

    std::ostringstream csv;
    csv << "scenario_id,N,t,response_error,derivative_error,transfer_residual,fitted_order\n";
    json rows = json::array();
    for (int n : resolutions) {
        TorusGrid grid = [&] {
            try {
                return grid_at(scenario.dim, n);
            } catch (const InvalidArgument& e) {
                throw ConfigError(std::string("sweep.resolutions: ") + e.what());
            }
        }();
        Problem p = build_problem(scenario, grid);
        const VectorField x =
            solve_for_field_detailed(p.rho, p.omega(), scenario.strategy, scenario.poisson_tol).field;
        ConvergenceReport response = response_check(p.omega(), p.rho, x, ts, scenario.flow_steps);
        ConvergenceReport deriv = derivative_check(p.map, x, ts, scenario.flow_steps);
        const bool transfer = scenario.sweep.transfer && is_expanding_circle(p.map);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            double tr = std::nan("");
            if (transfer) {
                VolumeDensity eta_t = pushforward_density(p.omega(), x, ts[i], scenario.flow_steps);
                tr = transfer_check({p.map, x, ts[i], scenario.flow_steps}, eta_t, n);
            }
            csv << scenario.output.scenario_id << ',' << n << ',' << real(ts[i]) << ',' << real(response.error[i])
                << ',' << real(deriv.error[i]) << ',' << real(tr) << ',' << real(response.fitted_order) << '\n';
            rows.push_back({{"scenario_id", scenario.output.scenario_id},
                            {"N", n},
                            {"t", ts[i]},
                            {"response_error", response.error[i]},
                            {"derivative_error", deriv.error[i]},
                            {"transfer_residual", std::isfinite(tr) ? json(tr) : json()},
                            {"fitted_order",
                             std::isfinite(response.fitted_order) ? json(response.fitted_order) : json()}});
        }
    }
    if (options.format == Format::json)
        write_json(options.out_dir / "sweep.json", rows);
    else
        write_text(options.out_dir / "sweep.csv", csv.str());
    if (!options.quiet) log << "sweep: wrote " << rows.size() << " rows\n";
    return kOk;
}

int run_command(const std::string& command, const std::filesystem::path& config, const Options& options,
                std::ostream& log, std::ostream& err) {
    try {
        Scenario scenario = load_scenario(config);
        if (command == "solve") return run_solve(scenario, options, log);
        if (command == "verify") return run_verify(scenario, options, log, err);
        if (command == "moser") return run_moser(scenario, options, log, err);
        if (command == "sweep") return run_sweep(scenario, options, log);
        err << "unknown command \"" << command << "\"\n";
        return kUsage;
    } catch (const NormalizationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const ConfigError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const InvalidArgument& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const DomainError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const PreconditionError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << "\n";
        return kConvergence;
    } catch (const NumericalQualityError& e) {
        err << "numerical quality error: " << e.what() << "\n";
        return kConvergence;
    } catch (const ConstructionError& e) {
        err << "construction error: " << e.what() << "\n";
        return kConvergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kConvergence;
    }
}

}  // namespace conjresp::cli
