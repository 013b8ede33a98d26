// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
#include "absde/bounds.hpp"
#include "absde/norms.hpp"
#include "absde/parallel.hpp"
#include "absde/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace absde;

namespace {

constexpr std::uint64_t kSeed = 1;

// 1: Cole-Hopf
constexpr double kColeHopfTol = 0.02;
constexpr double kRuntimeLimit = 60.0;
// 2: delay ODE
constexpr double kDelayTol = 0.01;
constexpr double kDelayZSup = 0.02;
// 3: martingale
constexpr int kMartingaleSpu = 10;
constexpr double kMartingaleFactor = 10.0;
constexpr double kMartingaleZTol = 0.02;
// 4: split contraction
constexpr double kSplitRatio = 0.5;
constexpr double kNoiseMultiple = 3.0;
// 6: constants
constexpr double kGoldenRel = 1e-12;
// 7: refinement
constexpr double kQuadCoeff = 0.45;
constexpr double kMinSlope = 0.4;
// 8: estimates
constexpr double kEstimateTol = 0.10;
constexpr double kJnNorm = 0.5;
constexpr double kJnSlack = 0.05;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const Error& e) {
        o = {false, std::string("error: ") + std::string(error_code_name(e.code())) + ": " + e.what()};
    } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d %s: %s (%s)\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GrowthParams dims(std::size_t n, std::size_t d, double T = 1.0) {
    GrowthParams p;
    p.n = n;
    p.d = d;
    p.T = T;
    return p;
}

GrowthParams zero_params() {
    GrowthParams p = dims(1, 1);
    for (const auto& name : GrowthParams::names()) p.set(name, 0.0);
    p.gamma = 1.0;
    p.L = 1.0;
    p.M4 = 1.0;
    return p;
}

// Y_t = 1 + int_t^1 Y_{s+1/2} ds with Y = 1 on [1, 3/2], explicit Euler
double delay_ode(int n) {
    const double h = 1.0 / n;
    std::vector<double> y(n + n / 2 + 1, 1.0);
    for (int k = n - 1; k >= 0; --k) y[k] = y[k + 1] + h * y[k + 1 + n / 2];
    return y[0];
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

std::string csv_of(const SolveResult& r, const PathEnsemble& e, const RegressionBasis& basis) {
    return summary_csv(r.field, bmo_profile(r.field.Z, e, basis, 0, e.grid.last_index()));
}

struct Run {
    SolveResult result;
    PathEnsemble ensemble;
    double seconds = 0.0;
};

Run cole_hopf_run() {
    const auto t0 = std::chrono::steady_clock::now();
    const Model m = builtin("cole_hopf", dims(1, 1), {{"gamma", 1.0}});
    Run r{{}, simulate(build_grid(1.0, 0.0, 100, constant_delay(0.0), constant_delay(0.0)), 50000, 1, kSeed), 0.0};
    r.result = picard_solve(m.spec, terminal_builtin("brownian", 1, 1), r.ensemble, {});
    r.seconds = seconds_since(t0);
    return r;
}

Run delay_run() {
    const auto t0 = std::chrono::steady_clock::now();
    const Model m = builtin("linear_delay", dims(1, 1), {{"a", 0.0}, {"b", 1.0}});
    const TerminalData one = terminal_from_expressions({"1"}, {"0"}, 1, 1);
    Run r{{}, simulate(build_grid(1.0, 0.5, 200, constant_delay(0.5), constant_delay(0.0)), 10000, 1, kSeed), 0.0};
    r.result = picard_solve(m.spec, one, r.ensemble, {});
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace

int main() {
    set_thread_count(1);
    Run ch, delay;

    criterion(1, "cole_hopf_oracle", [&] {
        ch = cole_hopf_run();
        const double oracle = 0.5;  // ln E exp(W_1)
        const double err = std::fabs(ch.result.field.Y.at(0, 0, 0) - oracle);
        return Outcome{err <= kColeHopfTol && ch.seconds <= kRuntimeLimit,
                       "|Y0 - 0.5| = " + num(err) + " <= " + num(kColeHopfTol) + ", runtime " + num(ch.seconds) +
                           " s <= " + num(kRuntimeLimit) + " s on 1 thread"};
    });

    criterion(2, "delay_oracle", [&] {
        delay = delay_run();
        const double oracle = delay_ode(400000);
        const double err = std::fabs(delay.result.field.Y.at(0, 0, 0) - oracle);
        const double zsup = estimate_sup_norm(delay.result.field.Z, 0, delay.ensemble.grid.terminal_index);
        return Outcome{err <= kDelayTol && zsup <= kDelayZSup && delay.seconds <= kRuntimeLimit,
                       "|Y0 - " + num(oracle) + "| = " + num(err) + " <= " + num(kDelayTol) + ", sup|Z| = " +
                           num(zsup) + " <= " + num(kDelayZSup) + ", runtime " + num(delay.seconds) + " s"};
    });

    criterion(3, "martingale_exactness", [&] {
        const std::size_t M = 100000;
        const Model m = builtin("zero", dims(1, 1));
        const PathEnsemble e =
            simulate(build_grid(1.0, 0.0, kMartingaleSpu, constant_delay(0.0), constant_delay(0.0)), M, 1, kSeed);
        SolverOptions opt;
        opt.basis.degree_or_bins = 1;
        const SolveResult r = picard_solve(m.spec, terminal_builtin("brownian", 1, 1), e, opt);
        double y_rms = 0.0, z_rms = 0.0;
        for (std::size_t k = 0; k < e.grid.terminal_index; ++k) {
            double sy = 0.0, sz = 0.0;
            for (std::size_t p = 0; p < M; ++p) {
                const double dy = r.field.Y.at(k, 0, p) - e.states.at(k, 0, p);
                const double dz = r.field.Z.at(k, 0, p) - 1.0;
                sy += dy * dy;
                sz += dz * dz;
            }
            y_rms = std::max(y_rms, std::sqrt(sy / M));
            z_rms = std::max(z_rms, std::sqrt(sz / M));
        }
        const double bound = kMartingaleFactor * std::sqrt(e.grid.step / static_cast<double>(M));
        return Outcome{y_rms <= bound && z_rms <= kMartingaleZTol,
                       "max node RMS |Y - W| = " + num(y_rms) + " <= " + num(bound) + ", max node RMS |Z - 1| = " +
                           num(z_rms) + " <= " + num(kMartingaleZTol)};
    });

    criterion(4, "split_contraction", [&] {
        const double C = 0.25, T = 1.0;
        const Model m = builtin("split_fg", dims(1, 1, T), {{"C", C}});
        const TerminalData t = terminal_from_expressions({"w1"}, {"1"}, 1, 1);
        const PathEnsemble e = simulate(build_grid(T, 0.5, 100, constant_delay(0.5), constant_delay(0.25)), 20000, 1, kSeed);
        SolverOptions opt;
        opt.tol = 1e-6;
        const SolveResult r = two_stage_solve(m.spec, t, e, opt);
        const auto& rep = r.report;
        const double alpha = 64.0 * C * C * T;
        bool ok = rep.weight_alpha == alpha;
        std::size_t checked = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < rep.weighted_ratios.size(); ++i)
            if (rep.weighted_distances[i + 1] > kNoiseMultiple * rep.noise_floor) {
                ++checked;
                worst = std::max(worst, rep.weighted_ratios[i]);
                ok = ok && rep.weighted_ratios[i] <= kSplitRatio;
            }
        ok = ok && checked > 0;
        return Outcome{ok, "alpha = " + num(rep.weight_alpha) + ", " + std::to_string(checked) +
                               " iterates above " + num(kNoiseMultiple) + " x noise floor " + num(rep.noise_floor) +
                               ", worst weighted ratio " + num(worst) + " <= " + num(kSplitRatio)};
    });

    criterion(5, "bound_dominance", [&] {
        GrowthParams p = dims(2, 2);
        const TimeGrid g = build_grid(1.0, 0.5, 100, constant_delay(0.5), constant_delay(0.0));
        p.M1 = std::sqrt(2.0);
        p.M2 = 0.0;
        p.M3 = 0.0;
        p.M4 = 1.0;
        p.L = g.domination_L;
        const Model m = builtin("diag_quadratic_delay", p, {{"sigma0", 0.1}});
        const TerminalData xi = terminal_from_expressions({"min(max(w1, -1), 1)", "min(max(w2, -1), 1)"}, {}, 2, 2);
        const ValidationReport v = validate_growth(m.spec, AssumptionClass::GlobalLinearGrowth, 100000, 100.0, kSeed);
        const GlobalConstants gc = global_constants(m.spec.params, 2.0);
        const PathEnsemble e = simulate(g, 20000, 2, kSeed);
        const SolveResult r = picard_solve(m.spec, xi, e, {});
        const double xi_sup = estimate_sup_norm(r.field.Y, g.terminal_index, g.last_index());
        const double sup = estimate_sup_norm(r.field.Y, 0, g.last_index());
        const double bmo = estimate_bmo_norm(r.field.Z, e, {}, 0, g.terminal_index);
        const bool ok = v.pass && xi_sup <= *p.M1 && sup <= gc.Q1.value() && bmo * bmo <= gc.Q2.value();
        return Outcome{ok, std::string("growth check ") + (v.pass ? "PASS" : "FAIL") + ", sup|xi| = " + num(xi_sup) +
                               " <= M1, sup|Y| = " + num(sup) + " <= Q1 = " + gc.Q1.str() + ", bmo(Z)^2 = " +
                               num(bmo * bmo) + " <= Q2 = " + gc.Q2.str()};
    });

    criterion(6, "constant_goldens", [&] {
        auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(b); };
        const LocalConstants lc = local_constants(zero_params());
        GrowthParams q1 = zero_params();
        q1.M1 = 1.0;
        q1.M3 = 2.0;
        const GlobalConstants g1 = global_constants(q1, 2.0);
        GrowthParams e0 = zero_params();
        e0.lambda0 = 1.0;
        e0.sigma = 0.5;
        e0.sigma0 = 0.5;
        const GlobalConstants g2 = global_constants(e0, 2.0);
        const double errs[] = {rel(lc.K1, 2.0 * std::log(3.0)), rel(lc.K2.value(), 83.0), rel(g1.Q1.value(), 6.0),
                               rel(g2.epsilon0, 1.0 / 304.0), rel(R_of_q(2.0), 16.0)};
        const double worst = *std::max_element(std::begin(errs), std::end(errs));
        return Outcome{worst <= kGoldenRel, "K1 = " + num(lc.K1) + ", K2 = " + lc.K2.str() + ", Q1 = " + g1.Q1.str() +
                                                ", eps0 = " + num(g2.epsilon0) + ", R(2) = " + num(R_of_q(2.0)) +
                                                ", worst rel error " + num(worst) + " <= " + num(kGoldenRel)};
    });

    criterion(7, "refinement_convergence", [&] {
        const Model m = builtin("cole_hopf", dims(1, 1), {{"gamma", 1.0}});
        const TerminalData xi = terminal_from_expressions({num(kQuadCoeff) + "*w1^2"}, {"0"}, 1, 1);
        const double oracle = -0.5 * std::log(1.0 - 2.0 * kQuadCoeff);  // ln E exp(a W_1^2)
        const auto flat = [](int spu) { return build_grid(1.0, 0.0, spu, constant_delay(0.0), constant_delay(0.0)); };
        const PathEnsemble fine = simulate(flat(200), 100000, 1, kSeed);
        std::vector<double> log_dt, log_err, errs;
        std::string detail;
        for (int spu : {25, 50, 100, 200}) {
            const PathEnsemble e = spu == 200 ? fine : coarsen(fine, flat(spu));
            const SolveResult r = picard_solve(m.spec, xi, e, {});
            const double err = std::fabs(r.field.Y.at(0, 0, 0) - oracle);
            errs.push_back(err);
            log_dt.push_back(std::log(e.grid.step));
            log_err.push_back(std::log(err));
            detail += "N=" + std::to_string(spu) + " err " + num(err) + ", ";
        }
        bool monotone = true;
        for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] <= errs[i - 1];
        const double slope = lsq_slope(log_dt, log_err);
        return Outcome{monotone && slope >= kMinSlope, detail + (monotone ? "nonincreasing" : "not monotone") +
                                                           ", log-log slope " + num(slope) + " >= " + num(kMinSlope)};
    });

    criterion(8, "estimate_diagnostics", [&] {
        if (ch.ensemble.path_count == 0) ch = cole_hopf_run();
        const Model m = builtin("cole_hopf", dims(1, 1), {{"gamma", 1.0}});
        const EstimateReport est = verify_estimates(ch.result.field, m.spec, m.spec.params, ch.ensemble, {}, kEstimateTol);
        const EstimateCheck& c = est.checks.at(2);

        const PathEnsemble e = simulate(build_grid(1.0, 0.0, 50, constant_delay(0.0), constant_delay(0.0)), 10000, 1, kSeed);
        const NodeArray Z(e.grid.node_count, 1, e.path_count, kJnNorm);
        const double norm = estimate_bmo_norm(Z, e, {}, 0, e.grid.terminal_index);
        const ExponentialMomentCheck jn = exponential_moment_check(Z, e, norm, 0, e.grid.terminal_index, kJnSlack);
        const bool ok = c.pass && c.worst_slack >= -kEstimateTol && jn.applicable && jn.pass &&
                        std::fabs(norm - kJnNorm) <= 1e-12;
        return Outcome{ok, "exp(gamma|Y|) bound " + std::string(c.pass ? "PASS" : "FAIL") + " worst slack " +
                               num(c.worst_slack) + " >= -" + num(kEstimateTol) + "; constant Z bmo " + num(norm) +
                               ", moment " + num(jn.worst_moment) + " <= " + num(jn.bound) + " x (1 + " +
                               num(kJnSlack) + ")"};
    });

    criterion(9, "thread_determinism", [&] {
        if (ch.ensemble.path_count == 0) ch = cole_hopf_run();
        if (delay.ensemble.path_count == 0) delay = delay_run();
        const std::string ch1 = csv_of(ch.result, ch.ensemble, {});
        const std::string d1 = csv_of(delay.result, delay.ensemble, {});
        set_thread_count(8);
        const Run ch8 = cole_hopf_run();
        const Run d8 = delay_run();
        const bool same_ch = ch1 == csv_of(ch8.result, ch8.ensemble, {});
        const bool same_d = d1 == csv_of(d8.result, d8.ensemble, {});
        set_thread_count(1);
        return Outcome{same_ch && same_d, std::string("cole_hopf CSV ") + (same_ch ? "identical" : "differs") +
                                              ", delay CSV " + (same_d ? "identical" : "differs") + " on 1 vs 8 threads"};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
