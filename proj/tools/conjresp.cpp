#include "conjresp/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <utility>

int main(int argc, char** argv) {
    CLI::App app{"conjresp: conjugating vector fields with a prescribed first-order density response"};
    app.require_subcommand(1);

    std::string config;
    std::string out = ".";
    std::string format = "json";
    bool quiet = false;

    const std::pair<const char*, const char*> commands[] = {
        {"solve", "build the conjugating field X and write it with theta and u"},
        {"verify", "finite-difference response, derivative and transfer checks"},
        {"moser", "transport the invariant density to a target density"},
        {"sweep", "tabulate errors over t and resolution"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--quiet", quiet, "suppress the summary on stdout");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : conjresp::cli::kValidation;
    }

    conjresp::cli::Options options;
    options.out_dir = out;
    options.quiet = quiet;
    std::string command = app.get_subcommands().front()->get_name();
    // Sweep tables are plot-ready CSV unless JSON is asked for explicitly.
    bool format_given = false;
    for (auto* sub : app.get_subcommands()) format_given = format_given || sub->count("--format") > 0;
    if (format == "csv" || (command == "sweep" && !format_given))
        options.format = conjresp::cli::Format::csv;

    return conjresp::cli::run_command(command, config, options, std::cout, std::cerr);
}
