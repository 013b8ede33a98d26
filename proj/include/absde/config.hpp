#pragma once
// Run configuration: one JSON document drives every command.

#include "absde/model.hpp"
#include "absde/solver.hpp"
#include "absde/timegrid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace absde {

struct DelayConfig {
    std::string kind = "constant";  // constant | expression
    double value = 0.0;
    std::string expression;
    bool operator==(const DelayConfig&) const = default;
};

struct ProblemConfig {
    std::size_t n = 1;
    std::size_t d = 1;
    double T = 1.0;
    double K = 0.0;
    int steps_per_unit = 100;
    DelayConfig delta, zeta;
    /// Overrides the grid's domination constant.
    std::optional<double> L;
    bool operator==(const ProblemConfig&) const = default;
};

/// A single entry naming a terminal builtin, or one expression per component.
struct TerminalConfig {
    std::vector<std::string> xi{"zero"};
    std::vector<std::string> eta{"zero"};
    bool operator==(const TerminalConfig&) const = default;
};

struct GeneratorConfig {
    std::optional<std::string> builtin;
    std::map<std::string, double> knobs;
    std::map<std::string, double> params;
    std::vector<std::string> expressions;
    std::vector<std::string> split_g;
    std::vector<std::string> convexity;
    std::optional<std::string> claimed_assumption;
    bool operator==(const GeneratorConfig&) const = default;
};

struct SolverConfig {
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    std::string basis = "polynomial";  // polynomial | bins
    int degree = 3;                    // polynomial degree or bin count
    double ridge = 1e-10;
    double z_max = 25.0;
    double picard_tol = 1e-3;
    std::size_t max_iter = 50;
    std::optional<double> kappa;
    bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
    std::string csv_path = "summary.csv";
    std::string report_path = "report.txt";
    bool operator==(const OutputConfig&) const = default;
};

struct BoundsConfig {
    double q = 2.0;
    /// Deterministic bound on the integrated growth term used by I(q).
    double gamma_bar = 0.0;
    bool operator==(const BoundsConfig&) const = default;
};

struct ConvergencePair {
    int steps_per_unit = 0;
    std::size_t paths = 0;
    bool operator==(const ConvergencePair&) const = default;
};

struct ConvergenceConfig {
    std::vector<ConvergencePair> pairs{{25, 100000}, {50, 100000}, {100, 100000}, {200, 100000}};
    std::string oracle = "cole_hopf";  // cole_hopf | linear_delay | zero
    bool operator==(const ConvergenceConfig&) const = default;
};

struct ValidationConfig {
    std::size_t samples = 100000;
    double radius = 100.0;
    bool operator==(const ValidationConfig&) const = default;
};

struct RunConfig {
    ProblemConfig problem;
    TerminalConfig terminal;
    GeneratorConfig generator;
    SolverConfig solver;
    OutputConfig outputs;
    BoundsConfig bounds;
    ConvergenceConfig convergence;
    ValidationConfig validation;
    bool operator==(const RunConfig&) const = default;
};

/// Throws SchemaError naming the offending JSON path, or ParseError for a
/// malformed expression.
RunConfig parse_config(const std::string& text);
/// Effective config with every default filled in; parse_config(echo_config(c)) == c.
std::string echo_config(const RunConfig& config);

DelayFn make_delay(const DelayConfig& delay);
TimeGrid make_grid(const ProblemConfig& problem);
/// Generator and terminal data; params get n, d, T from the problem.
Model make_model(const RunConfig& config);
SolverOptions make_solver_options(const SolverConfig& solver);

}  // namespace absde
