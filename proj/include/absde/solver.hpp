#pragma once
// Regression Monte Carlo solvers for anticipated BSDEs.
//
// One backward sweep solves the decoupled equation in which the anticipated
// arguments (and the other rows of z) are read from a frozen field. Picard
// iteration, window splicing and the two-stage split scheme are built on it.

#include "absde/error.hpp"
#include "absde/model.hpp"
#include "absde/norms.hpp"
#include "absde/paths.hpp"
#include "absde/regression.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace absde {

struct SolverOptions {
    RegressionBasis basis;
    /// Entries of z handed to the driver are clipped to [-z_max, z_max].
    double z_max = 25.0;
    double tol = 1e-3;
    std::size_t max_iter = 50;
    double overflow_guard = 1e9;
};

struct SweepMeta {
    std::size_t sweeps = 0;
    std::size_t z_evaluated = 0;
    std::size_t z_clipped = 0;

    double clip_frequency() const { return z_evaluated ? double(z_clipped) / double(z_evaluated) : 0.0; }
    /// More than 0.1% of driver z entries were clipped.
    bool clip_flagged() const { return clip_frequency() > 1e-3; }
};

struct SolutionField {
    TimeGrid grid;
    std::size_t n = 1;
    std::size_t d = 1;
    NodeArray Y;  // n components per node
    NodeArray Z;  // n*d components per node, row-major
    SweepMeta meta;
};

/// Zero on [0, T), terminal data (xi, eta) on [T, T+K].
SolutionField initial_field(std::size_t n, const TerminalData& terminal, const PathEnsemble& ensemble);

/// Nodes first..last; the sweep recomputes last-1 down to first and treats
/// the values at `last` (and everything after) as given.
struct Window {
    std::size_t first = 0;
    std::size_t last = 0;
};

Window full_window(const TimeGrid& grid);

/// Recomputes `out` on the window using `frozen` for the anticipated
/// arguments, the y argument and the off-diagonal rows of z. Throws
/// DivergedSweep when |Y| exceeds the overflow guard.
void sweep_into(const GeneratorSpec& spec, const PathEnsemble& ensemble, const SolverOptions& options,
                const SolutionField& frozen, Window window, SolutionField& out);

/// Copy of `frozen` with the window recomputed.
SolutionField backward_sweep(const GeneratorSpec& spec, const PathEnsemble& ensemble, const SolverOptions& options,
                             const SolutionField& frozen, Window window);

struct ConvergenceReport {
    /// Per iteration: sup-norm of the Y change plus BMO estimate of the Z change.
    std::vector<double> distances;
    std::vector<double> y_distances;
    std::vector<double> z_distances;
    std::vector<double> ratios;
    bool converged = false;
    std::size_t iterations = 0;
    double tolerance = 0.0;
    /// Splice runs: one report per window, latest window (nearest T) first.
    std::vector<ConvergenceReport> windows;

    /// Split scheme only: mean over paths of max_k exp(alpha t_k) |dY_k|^2.
    std::vector<double> weighted_distances;
    std::vector<double> weighted_ratios;
    double weight_alpha = 0.0;
    double noise_floor = 0.0;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& message, ConvergenceReport report)
        : Error(ErrorCode::NoConvergence, message), report_(std::move(report)) {}
    const ConvergenceReport& report() const { return report_; }

private:
    ConvergenceReport report_;
};

struct SolveResult {
    SolutionField field;
    ConvergenceReport report;
};

/// Iterates field <- sweep(frozen = field) from `start` until the distance
/// drops to tol. Throws NoConvergence when max_iter is reached with the last
/// ratio >= 1; otherwise returns with converged = false.
SolveResult picard_solve(const GeneratorSpec& spec, const PathEnsemble& ensemble, const SolverOptions& options,
                         Window window, SolutionField start);
SolveResult picard_solve(const GeneratorSpec& spec, const TerminalData& terminal, const PathEnsemble& ensemble,
                         const SolverOptions& options);

/// Solves on windows of length kappa from T backwards, each window using the
/// solved later part as terminal data. Throws WindowMisaligned when T/kappa
/// or kappa/dt is not whole, or when kappa exceeds the admissible window for
/// a generator claiming one-sided growth with anticipated Z.
SolveResult splice_solve(const GeneratorSpec& spec, const TerminalData& terminal, const PathEnsemble& ensemble,
                         const SolverOptions& options, double kappa);

/// Split generators f(t, z) + g: solves the f-equation once, then iterates
/// Y <- Y_f + sum_{j>=k} E_k[g_j] dt with Z held fixed.
SolveResult two_stage_solve(const GeneratorSpec& spec, const TerminalData& terminal, const PathEnsemble& ensemble,
                            const SolverOptions& options);

struct EstimateCheck {
    std::string name;
    std::size_t component = 0;
    std::vector<double> lhs, rhs, slack;  // per node 0..terminal_index
    double worst_slack = 0.0;
    bool pass = false;
};

struct EstimateReport {
    std::vector<EstimateCheck> checks;
    double tolerance = 0.10;
    double bmo_norm = 0.0;
    ExponentialMomentCheck exponential_moment;
    bool pass = false;
};

/// Sample versions of the exponential a priori estimates, node by node, with
/// path averages in place of expectations. A check passes when its worst
/// relative slack (rhs - lhs) / rhs is at least -tolerance.
EstimateReport verify_estimates(const SolutionField& field, const GeneratorSpec& spec, const GrowthParams& params,
                                const PathEnsemble& ensemble, const RegressionBasis& basis, double tolerance = 0.10);

/// Per-node CSV summary: time, Y mean/std/min/max per component, BMO estimate of Z to date.
std::string summary_csv(const SolutionField& field, const BmoProfile& bmo);

}  // namespace absde
