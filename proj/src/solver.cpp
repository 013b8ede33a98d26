#include "absde/solver.hpp"

#include "absde/bounds.hpp"
#include "absde/kernels.hpp"
#include "absde/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

namespace absde {
namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Max over paths and nodes in the window of |a - b| (vector norm across components).
double sup_distance(const NodeArray& a, const NodeArray& b, std::size_t first, std::size_t last) {
    const std::size_t M = a.paths();
    std::vector<double> sq(M);
    double best = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        std::fill(sq.begin(), sq.end(), 0.0);
        for (std::size_t c = 0; c < a.comps(); ++c) {
            const double* x = a.row(k, c);
            const double* y = b.row(k, c);
            for (std::size_t m = 0; m < M; ++m) sq[m] += (x[m] - y[m]) * (x[m] - y[m]);
        }
        for (double s : sq) best = std::max(best, s);
    }
    return std::sqrt(best);
}

void finish_ratios(ConvergenceReport& r) {
    r.ratios.clear();
    for (std::size_t i = 1; i < r.distances.size(); ++i)
        r.ratios.push_back(r.distances[i - 1] > 0.0 ? r.distances[i] / r.distances[i - 1]
                                                    : (r.distances[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
}

/// log of the mean of exp(v[m]).
double log_mean_exp(const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    if (std::isinf(top)) return top;
    std::vector<double> e(v.size());
    for (std::size_t m = 0; m < v.size(); ++m) e[m] = std::exp(v[m] - top);
    return top + std::log(blocked_mean(e.data(), e.size()));
}

}  // namespace

SolutionField initial_field(std::size_t n, const TerminalData& terminal, const PathEnsemble& ens) {
    const TimeGrid& g = ens.grid;
    const std::size_t d = ens.dimension, M = ens.path_count;
    SolutionField f;
    f.grid = g;
    f.n = n;
    f.d = d;
    f.Y = NodeArray(g.node_count, n, M);
    f.Z = NodeArray(g.node_count, n * d, M);
    parallel_blocks(M, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<double> w(d), xi(n), eta(n * d);
        for (std::size_t m = begin; m < end; ++m)
            for (std::size_t k = g.terminal_index; k < g.node_count; ++k) {
                for (std::size_t j = 0; j < d; ++j) w[j] = ens.states.at(k, j, m);
                terminal.xi(g.time(k), w.data(), xi.data());
                terminal.eta(g.time(k), w.data(), eta.data());
                for (std::size_t i = 0; i < n; ++i) f.Y.at(k, i, m) = xi[i];
                for (std::size_t c = 0; c < n * d; ++c) f.Z.at(k, c, m) = eta[c];
            }
    });
    return f;
}

Window full_window(const TimeGrid& grid) { return {0, grid.terminal_index}; }

void sweep_into(const GeneratorSpec& spec, const PathEnsemble& ens, const SolverOptions& opt,
                const SolutionField& frozen, Window win, SolutionField& out) {
    const TimeGrid& g = ens.grid;
    if (win.first > win.last || win.last > g.terminal_index)
        throw Error(ErrorCode::InvalidArgument, "sweep window must lie inside [0, T]");
    const std::size_t n = out.n, d = out.d, M = ens.path_count;
    const double dt = g.step;
    const auto& kt = kernels::active();

    std::vector<double> cey(n * M), phi(n * M, 0.0), psi(n * d * M, 0.0), tmp(M);
    std::vector<std::size_t> clipped(block_count(M)), evaluated(block_count(M));

    for (std::size_t k = win.last; k-- > win.first;) {
        const Regressor reg(ens, k, opt.basis);
        for (std::size_t i = 0; i < n; ++i) reg.project(out.Y.row(k + 1, i), cey.data() + i * M);
        for (std::size_t i = 0; i < n; ++i) {
            const double* next = out.Y.row(k + 1, i);
            const double* mean = cey.data() + i * M;
            for (std::size_t j = 0; j < d; ++j) {
                const double* dw = ens.increments.row(k, j);
                for (std::size_t m = 0; m < M; ++m) tmp[m] = (next[m] - mean[m]) * dw[m];
                double* z = out.Z.row(k, i * d + j);
                reg.project(tmp.data(), z);
                kt.affine(z, 1.0 / dt, 0.0, z, M);
            }
        }
        if (spec.uses_anticipated_y) {
            const std::size_t a = g.delta_map[k];
            for (std::size_t i = 0; i < n; ++i) {
                if (a == k)
                    std::copy_n(frozen.Y.row(k, i), M, phi.data() + i * M);
                else
                    reg.project(frozen.Y.row(a, i), phi.data() + i * M);
            }
        }
        if (spec.uses_anticipated_z) {
            const std::size_t b = g.zeta_map[k];
            for (std::size_t c = 0; c < n * d; ++c) {
                if (b == k)
                    std::copy_n(frozen.Z.row(k, c), M, psi.data() + c * M);
                else
                    reg.project(frozen.Z.row(b, c), psi.data() + c * M);
            }
        }

        std::atomic<bool> diverged{false};
        const double t = g.time(k);
        parallel_blocks(M, [&](std::size_t blk, std::size_t begin, std::size_t end) {
            std::vector<double> w(d), y(n), z(n * d), ph(n), ps(n * d), f(n), ynew(n);
            std::size_t clip_count = 0, eval_count = 0;
            for (std::size_t m = begin; m < end; ++m) {
                for (std::size_t j = 0; j < d; ++j) w[j] = ens.states.at(k, j, m);
                for (std::size_t i = 0; i < n; ++i) {
                    y[i] = frozen.Y.at(k, i, m);
                    ph[i] = phi[i * M + m];
                }
                for (std::size_t c = 0; c < n * d; ++c) ps[c] = psi[c * M + m];
                const DriverPoint x{t, w.data(), y.data(), z.data(), ph.data(), ps.data()};
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t r = 0; r < n; ++r) {
                        const NodeArray& src = r == i ? out.Z : frozen.Z;
                        for (std::size_t j = 0; j < d; ++j) {
                            const double v = src.at(k, r * d + j, m);
                            const double cv = std::clamp(v, -opt.z_max, opt.z_max);
                            if (r == i) {
                                ++eval_count;
                                if (cv != v) ++clip_count;
                            }
                            z[r * d + j] = cv;
                        }
                    }
                    spec.driver(x, f.data());
                    ynew[i] = cey[i * M + m] + f[i] * dt;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    if (!(std::fabs(ynew[i]) <= opt.overflow_guard)) diverged = true;
                    out.Y.at(k, i, m) = ynew[i];
                }
            }
            clipped[blk] = clip_count;
            evaluated[blk] = eval_count;
        });
        if (diverged) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "|Y| exceeded %.3g at t=%.17g (node %zu)", opt.overflow_guard, t, k);
            throw Error(ErrorCode::DivergedSweep, buf);
        }
        for (std::size_t b = 0; b < clipped.size(); ++b) {
            out.meta.z_clipped += clipped[b];
            out.meta.z_evaluated += evaluated[b];
        }
    }
    ++out.meta.sweeps;
}

SolutionField backward_sweep(const GeneratorSpec& spec, const PathEnsemble& ens, const SolverOptions& opt,
                             const SolutionField& frozen, Window win) {
    SolutionField out = frozen;
    sweep_into(spec, ens, opt, frozen, win, out);
    return out;
}

SolveResult picard_solve(const GeneratorSpec& spec, const PathEnsemble& ens, const SolverOptions& opt, Window win,
                         SolutionField start) {
    if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "Picard tolerance must be positive");
    if (opt.max_iter == 0) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
    ConvergenceReport rep;
    rep.tolerance = opt.tol;
    SolutionField current = std::move(start);
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        SolutionField next = current;
        sweep_into(spec, ens, opt, current, win, next);
        const double dy = sup_distance(next.Y, current.Y, win.first, win.last);
        const auto dz_fn = [&](std::size_t k, double* sq) {
            std::fill(sq, sq + ens.path_count, 0.0);
            for (std::size_t c = 0; c < next.Z.comps(); ++c) {
                const double* a = next.Z.row(k, c);
                const double* b = current.Z.row(k, c);
                for (std::size_t m = 0; m < ens.path_count; ++m) sq[m] += (a[m] - b[m]) * (a[m] - b[m]);
            }
        };
        const double dz = bmo_profile(dz_fn, ens, opt.basis, win.first, win.last).norm;
        rep.y_distances.push_back(dy);
        rep.z_distances.push_back(dz);
        rep.distances.push_back(dy + dz);
        rep.iterations = it;
        current = std::move(next);
        if (dy + dz <= opt.tol) {
            rep.converged = true;
            break;
        }
    }
    finish_ratios(rep);
    if (!rep.converged && !rep.ratios.empty() && rep.ratios.back() >= 1.0)
        throw NoConvergence("Picard iteration stalled after " + std::to_string(rep.iterations) +
                                " iterations (last distance " + fmt(rep.distances.back()) + ", ratio " +
                                fmt(rep.ratios.back()) + ")",
                            rep);
    return {std::move(current), std::move(rep)};
}

SolveResult picard_solve(const GeneratorSpec& spec, const TerminalData& terminal, const PathEnsemble& ens,
                         const SolverOptions& opt) {
    return picard_solve(spec, ens, opt, full_window(ens.grid), initial_field(spec.params.n, terminal, ens));
}

SolveResult splice_solve(const GeneratorSpec& spec, const TerminalData& terminal, const PathEnsemble& ens,
                         const SolverOptions& opt, double kappa) {
    const TimeGrid& g = ens.grid;
    const double raw = kappa * g.steps_per_unit;
    const double steps = std::round(raw);
    if (!(kappa > 0.0) || std::fabs(raw - steps) > 1e-9 * std::max(1.0, raw) || steps < 1.0)
        throw Error(ErrorCode::WindowMisaligned, "kappa=" + fmt(kappa) + " is not a whole number of grid steps");
    const std::size_t width = static_cast<std::size_t>(steps);
    if (g.terminal_index % width != 0)
        throw Error(ErrorCode::WindowMisaligned, "T/kappa=" + fmt(g.horizon_T / kappa) + " is not an integer");
    if (spec.claimed == AssumptionClass::GlobalOneSided) {
        GrowthParams p = spec.params;
        if (!p.L) p.L = g.domination_L;
        const double limit = kappa0_limit(p);
        if (kappa > limit)
            throw Error(ErrorCode::WindowMisaligned,
                        "kappa=" + fmt(kappa) + " exceeds the admissible window " + fmt(limit));
    }

    const std::size_t count = g.terminal_index / width;
    SolutionField field = initial_field(spec.params.n, terminal, ens);
    ConvergenceReport agg;
    agg.tolerance = opt.tol;
    agg.converged = true;
    for (std::size_t w = 1; w <= count; ++w) {
        const Window win{g.terminal_index - w * width, g.terminal_index - (w - 1) * width};
        const std::string tag = "window " + std::to_string(w) + "/" + std::to_string(count) + ": ";
        SolveResult r;
        try {
            r = picard_solve(spec, ens, opt, win, std::move(field));
        } catch (const NoConvergence& e) {
            throw NoConvergence(tag + e.what(), e.report());
        } catch (const Error& e) {
            throw Error(e.code(), tag + e.what());
        }
        field = std::move(r.field);
        agg.converged = agg.converged && r.report.converged;
        agg.iterations += r.report.iterations;
        for (std::size_t i = 0; i < r.report.distances.size(); ++i) {
            agg.distances.push_back(r.report.distances[i]);
            agg.y_distances.push_back(r.report.y_distances[i]);
            agg.z_distances.push_back(r.report.z_distances[i]);
        }
        agg.windows.push_back(std::move(r.report));
    }
    finish_ratios(agg);
    return {std::move(field), std::move(agg)};
}

SolveResult two_stage_solve(const GeneratorSpec& spec, const TerminalData& terminal, const PathEnsemble& ens,
                            const SolverOptions& opt) {
    if (!spec.has_split()) throw Error(ErrorCode::InvalidArgument, "two-stage solve needs a split generator");
    if (!(opt.tol > 0.0) || opt.max_iter == 0)
        throw Error(ErrorCode::InvalidArgument, "two-stage solve needs tol > 0 and max_iter > 0");
    const TimeGrid& g = ens.grid;
    const std::size_t n = spec.params.n, d = ens.dimension, M = ens.path_count, T_idx = g.terminal_index;
    const double dt = g.step;

    // stage 1: the f-equation alone does not read frozen values, one sweep suffices
    GeneratorSpec f_only = spec;
    f_only.split_g = nullptr;
    f_only.uses_anticipated_y = false;
    f_only.uses_anticipated_z = false;
    const SolutionField start = initial_field(n, terminal, ens);
    SolutionField stage1 = backward_sweep(f_only, ens, opt, start, full_window(g));

    ConvergenceReport rep;
    rep.tolerance = opt.tol;
    rep.weight_alpha = 64.0 * std::pow(spec.params.value_or("C", 0.0), 2) * g.horizon_T;
    {
        double var_sum = 0.0;
        std::vector<double> dev(M);
        for (std::size_t k = 0; k < T_idx; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                const double* y = stage1.Y.row(k, i);
                const double mean = blocked_mean(y, M);
                for (std::size_t m = 0; m < M; ++m) dev[m] = (y[m] - mean) * (y[m] - mean);
                var_sum += blocked_mean(dev.data(), M) * double(M) / double(M - 1);
            }
        rep.noise_floor = T_idx ? var_sum / double(T_idx) / double(M) : 0.0;
    }

    NodeArray Y = start.Y;
    NodeArray psi_cache(T_idx, n * d, M);
    bool psi_ready = false;
    std::vector<double> cea(n * M), phi(n * M), A(n * M, 0.0), weighted(M);
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        NodeArray Ynext = Y;
        std::fill(A.begin(), A.end(), 0.0);
        std::atomic<bool> diverged{false};
        for (std::size_t k = T_idx; k-- > 0;) {
            const Regressor reg(ens, k, opt.basis);
            for (std::size_t i = 0; i < n; ++i) reg.project(A.data() + i * M, cea.data() + i * M);
            const std::size_t a = g.delta_map[k], b = g.zeta_map[k];
            for (std::size_t i = 0; i < n; ++i) {
                if (a == k)
                    std::copy_n(Y.row(k, i), M, phi.data() + i * M);
                else
                    reg.project(Y.row(a, i), phi.data() + i * M);
            }
            if (!psi_ready)
                for (std::size_t c = 0; c < n * d; ++c) {
                    if (b == k)
                        std::copy_n(stage1.Z.row(k, c), M, psi_cache.row(k, c));
                    else
                        reg.project(stage1.Z.row(b, c), psi_cache.row(k, c));
                }
            const double t = g.time(k);
            parallel_blocks(M, [&](std::size_t, std::size_t begin, std::size_t end) {
                std::vector<double> w(d), y(n), z(n * d), ph(n), ps(n * d), gv(n);
                const DriverPoint x{t, w.data(), y.data(), z.data(), ph.data(), ps.data()};
                for (std::size_t m = begin; m < end; ++m) {
                    for (std::size_t j = 0; j < d; ++j) w[j] = ens.states.at(k, j, m);
                    for (std::size_t i = 0; i < n; ++i) {
                        y[i] = Y.at(k, i, m);
                        ph[i] = phi[i * M + m];
                    }
                    for (std::size_t c = 0; c < n * d; ++c) {
                        z[c] = std::clamp(stage1.Z.at(k, c, m), -opt.z_max, opt.z_max);
                        ps[c] = psi_cache.at(k, c, m);
                    }
                    spec.split_g(x, gv.data());
                    for (std::size_t i = 0; i < n; ++i) {
                        const double acc = gv[i] * dt + cea[i * M + m];
                        A[i * M + m] = acc;
                        const double v = stage1.Y.at(k, i, m) + acc;
                        if (!(std::fabs(v) <= opt.overflow_guard)) diverged = true;
                        Ynext.at(k, i, m) = v;
                    }
                }
            });
            if (diverged)
                throw Error(ErrorCode::DivergedSweep, "|Y| exceeded the overflow guard at node " + std::to_string(k));
        }
        psi_ready = true;

        const double dy = sup_distance(Ynext, Y, 0, T_idx);
        std::fill(weighted.begin(), weighted.end(), 0.0);
        for (std::size_t k = 0; k <= T_idx; ++k) {
            const double wk = std::exp(rep.weight_alpha * g.time(k));
            for (std::size_t m = 0; m < M; ++m) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double diff = Ynext.at(k, i, m) - Y.at(k, i, m);
                    s += diff * diff;
                }
                weighted[m] = std::max(weighted[m], wk * s);
            }
        }
        rep.weighted_distances.push_back(blocked_mean(weighted.data(), M));
        rep.y_distances.push_back(dy);
        rep.z_distances.push_back(0.0);
        rep.distances.push_back(dy);
        rep.iterations = it;
        Y = std::move(Ynext);
        if (dy <= opt.tol) {
            rep.converged = true;
            break;
        }
    }
    finish_ratios(rep);
    for (std::size_t i = 1; i < rep.weighted_distances.size(); ++i) {
        const double prev = rep.weighted_distances[i - 1];
        rep.weighted_ratios.push_back(prev > 0.0 ? rep.weighted_distances[i] / prev : 0.0);
    }
    stage1.Y = std::move(Y);
    stage1.meta.sweeps += rep.iterations;
    if (!rep.converged && !rep.ratios.empty() && rep.ratios.back() >= 1.0)
        throw NoConvergence("two-stage iteration stalled after " + std::to_string(rep.iterations) + " iterations", rep);
    return {std::move(stage1), std::move(rep)};
}

EstimateReport verify_estimates(const SolutionField& field, const GeneratorSpec& spec, const GrowthParams& p,
                                const PathEnsemble& ens, const RegressionBasis& basis, double tolerance) {
    const TimeGrid& g = ens.grid;
    const std::size_t n = field.n, d = field.d, M = ens.path_count, T_idx = g.terminal_index, last = g.last_index();
    const double dt = g.step;
    const double gamma = p.value_or("gamma", 1.0);
    const double theta = p.value_or("M3", 0.0) / g.horizon_T;
    const double sigma = p.value_or("sigma", 0.0), sigma0 = p.value_or("sigma0", 0.0);
    const double lambda = p.value_or("lambda", 0.0), lambda0 = p.value_or("lambda0", 0.0);
    const double alpha = p.value_or("alpha", 0.0);
    const double eps = gamma / 9.0;
    (void)spec;

    auto ynorm = [&](std::size_t k, std::size_t m) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += field.Y.at(k, i, m) * field.Y.at(k, i, m);
        return std::sqrt(s);
    };
    auto znorm = [&](std::size_t k, std::size_t m) {
        double s = 0.0;
        for (std::size_t c = 0; c < n * d; ++c) s += field.Z.at(k, c, m) * field.Z.at(k, c, m);
        return std::sqrt(s);
    };
    auto row_norm = [&](std::size_t k, std::size_t i, std::size_t m) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += field.Z.at(k, i * d + j, m) * field.Z.at(k, i * d + j, m);
        return std::sqrt(s);
    };

    // sup of |Y| over [t_k, T+K]
    std::vector<double> ysup(last + 1, 0.0);
    for (std::size_t k = last + 1; k-- > 0;) {
        double s = k == last ? 0.0 : ysup[k + 1];
        for (std::size_t m = 0; m < M; ++m) s = std::max(s, ynorm(k, m));
        ysup[k] = s;
    }

    EstimateReport rep;
    rep.tolerance = tolerance;
    for (std::size_t i = 0; i < n; ++i) {
        double xi_sup = 0.0;
        for (std::size_t k = T_idx; k <= last; ++k)
            for (std::size_t m = 0; m < M; ++m) xi_sup = std::max(xi_sup, std::fabs(field.Y.at(k, i, m)));

        EstimateCheck a{"exponential bound on |Y| under one-sided growth", i, {}, {}, {}, 0.0, false};
        EstimateCheck b{"exponential Z-energy bound (eps = gamma/9)", i, {}, {}, {}, 0.0, false};
        EstimateCheck c{"exp(gamma|Y_t|) <= E_t exp(gamma|xi| + gamma int zeta)", i, {}, {}, {}, 0.0, false};
        for (auto* chk : {&a, &b, &c}) {
            chk->lhs.assign(T_idx + 1, 0.0);
            chk->rhs.assign(T_idx + 1, 0.0);
            chk->slack.assign(T_idx + 1, 0.0);
        }

        std::vector<double> s_pow(M, 0.0), s_ant(M, 0.0), s_zeta(M, 0.0), s_energy(M, 0.0);
        std::vector<double> la(M), ra(M), lb(M), rb(M), lc(M), rc(M);
        double yi_sup = 0.0;
        for (std::size_t k = T_idx + 1; k-- > 0;) {
            if (k < T_idx) {
                const std::size_t ak = g.delta_map[k], bk = g.zeta_map[k];
                for (std::size_t m = 0; m < M; ++m) {
                    const double zn = znorm(k, m);
                    const double zb = znorm(bk, m);
                    const double own = row_norm(k, i, m);
                    double cross = 0.0;
                    for (std::size_t r = 0; r < n; ++r)
                        if (r != i) cross += std::pow(row_norm(k, r, m), 1.0 + alpha);
                    s_pow[m] += std::pow(zn, 1.0 + alpha) * dt;
                    s_ant[m] += zb * dt;
                    s_energy[m] += own * own * dt;
                    s_zeta[m] += (theta + sigma * ynorm(k, m) + sigma0 * ynorm(ak, m) + lambda * cross +
                                  lambda0 * std::pow(zb, 1.0 + alpha)) * dt;
                }
            }
            for (std::size_t m = 0; m < M; ++m) yi_sup = std::max(yi_sup, std::fabs(field.Y.at(k, i, m)));
            const double tau = g.horizon_T - g.time(k);
            for (std::size_t m = 0; m < M; ++m) {
                const double yabs = std::fabs(field.Y.at(k, i, m));
                la[m] = gamma * yabs;
                ra[m] = gamma * xi_sup + gamma * theta * g.horizon_T + (sigma + sigma0) * gamma * ysup[k] * tau +
                        lambda * gamma * s_pow[m] + lambda0 * gamma * s_ant[m];
                lb[m] = 0.5 * gamma * eps * s_energy[m];
                rb[m] = 6.0 * eps * yi_sup + 3.0 * eps * theta * g.horizon_T + 3.0 * eps * (sigma + sigma0) * ysup[k] * tau +
                        3.0 * eps * lambda * s_pow[m] + 3.0 * eps * lambda0 * s_ant[m];
                lc[m] = gamma * yabs;
                rc[m] = gamma * std::fabs(field.Y.at(T_idx, i, m)) + gamma * s_zeta[m];
            }
            for (auto [chk, l, r] : {std::tuple{&a, &la, &ra}, std::tuple{&b, &lb, &rb}, std::tuple{&c, &lc, &rc}}) {
                const double ll = log_mean_exp(*l), lr = log_mean_exp(*r);
                chk->lhs[k] = std::exp(ll);
                chk->rhs[k] = std::exp(lr);
                chk->slack[k] = 1.0 - std::exp(ll - lr);
            }
        }
        for (auto* chk : {&a, &b, &c}) {
            chk->worst_slack = *std::min_element(chk->slack.begin(), chk->slack.end());
            chk->pass = chk->worst_slack >= -tolerance;
            rep.checks.push_back(std::move(*chk));
        }
    }

    rep.bmo_norm = estimate_bmo_norm(field.Z, ens, basis, 0, T_idx);
    rep.exponential_moment = exponential_moment_check(field.Z, ens, rep.bmo_norm, 0, T_idx);
    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const EstimateCheck& c) { return c.pass; }) &&
               (!rep.exponential_moment.applicable || rep.exponential_moment.pass);
    return rep;
}

std::string summary_csv(const SolutionField& field, const BmoProfile& bmo) {
    const std::size_t n = field.n, M = field.Y.paths(), last = field.grid.last_index();
    std::string out = "# absde-lab v1\ntime";
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string p = "Y" + std::to_string(i);
        out += "," + p + "_mean," + p + "_std," + p + "_min," + p + "_max";
    }
    out += ",Z_bmo_to_date\n";
    // suffix max of the conditional energy profile (profile covers nodes 0..size-1)
    std::vector<double> to_date(last + 1, 0.0);
    double run = 0.0;
    for (std::size_t k = last + 1; k-- > 0;) {
        if (k < bmo.conditional_energy.size()) run = std::max(run, bmo.conditional_energy[k]);
        to_date[k] = std::sqrt(run);
    }
    std::vector<double> dev(M);
    for (std::size_t k = 0; k <= last; ++k) {
        out += fmt(field.grid.time(k));
        for (std::size_t i = 0; i < n; ++i) {
            const double* y = field.Y.row(k, i);
            const double mean = blocked_mean(y, M);
            for (std::size_t m = 0; m < M; ++m) dev[m] = (y[m] - mean) * (y[m] - mean);
            const double sd = std::sqrt(blocked_mean(dev.data(), M) * double(M) / double(M - 1));
            const auto [lo, hi] = std::minmax_element(y, y + M);
            out += "," + fmt(mean) + "," + fmt(sd) + "," + fmt(*lo) + "," + fmt(*hi);
        }
        out += "," + fmt(to_date[k]) + "\n";
    }
    return out;
}

}  // namespace absde
