// absde <solve|bounds|convergence|oracle-check> --config <path> [--seed S] [--paths M] [--steps N] [--out DIR] [--threads T]
#include "absde/commands.hpp"
#include "absde/config.hpp"
#include "absde/error.hpp"
#include "absde/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"Regression Monte Carlo lab for anticipated BSDEs"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<int> steps;
    std::optional<unsigned> threads;
    for (const char* name : {"solve", "bounds", "convergence", "oracle-check"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--seed", seed, "overrides solver.seed");
        sub->add_option("--paths", paths, "overrides solver.paths")->check(CLI::Range(2ul, 1ul << 40));
        sub->add_option("--steps", steps, "overrides problem.steps_per_unit")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "directory for relative output paths");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        std::ifstream in(config_path);
        if (!in) throw absde::Error(absde::ErrorCode::IoError, "cannot read " + config_path);
        std::stringstream text;
        text << in.rdbuf();
        absde::RunConfig config = absde::parse_config(text.str());
        if (seed) config.solver.seed = *seed;
        if (paths) config.solver.paths = *paths;
        if (steps) config.problem.steps_per_unit = *steps;
        if (threads) absde::set_thread_count(*threads);
        return absde::run_command(command, config, out_dir, std::cout);
    } catch (const absde::ParseError& e) {
        std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
        return 2;
    } catch (const absde::Error& e) {
        std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
        return absde::exit_status(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
