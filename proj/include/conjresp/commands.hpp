#pragma once

#include "conjresp/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace conjresp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kConvergence = 3, kVerification = 4 };

enum class Format { json, csv };

struct Options {
    std::filesystem::path out_dir = ".";
    bool quiet = false;
    Format format = Format::json;
};

int run_solve(const Scenario& scenario, const Options& options, std::ostream& log);
int run_verify(const Scenario& scenario, const Options& options, std::ostream& log, std::ostream& err);
int run_moser(const Scenario& scenario, const Options& options, std::ostream& log, std::ostream& err);
int run_sweep(const Scenario& scenario, const Options& options, std::ostream& log);

/// Loads the config, dispatches on `command`, and maps library errors onto
/// exit codes: 2 validation, 3 convergence/numerical quality, 4 failed check.
int run_command(const std::string& command, const std::filesystem::path& config, const Options& options,
                std::ostream& log, std::ostream& err);

}  // namespace conjresp::cli
