#include "absde/norms.hpp"

#include "absde/error.hpp"
#include "absde/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace absde {
namespace {

void check_window(const NodeArray& field, std::size_t first, std::size_t last) {
    if (first > last || last >= field.nodes()) throw Error(ErrorCode::InvalidArgument, "norm window outside the field");
}

SquaredNormFn frobenius(const NodeArray& Z) {
    return [&Z](std::size_t k, double* sq) {
        const std::size_t M = Z.paths();
        std::fill(sq, sq + M, 0.0);
        for (std::size_t c = 0; c < Z.comps(); ++c) {
            const double* z = Z.row(k, c);
            for (std::size_t m = 0; m < M; ++m) sq[m] += z[m] * z[m];
        }
    };
}

}  // namespace

double estimate_sup_norm(const NodeArray& field, std::size_t first, std::size_t last) {
    check_window(field, first, last);
    const std::size_t M = field.paths();
    if (field.comps() == 1) {
        const auto& kt = kernels::active();
        double best = 0.0;
        for (std::size_t k = first; k <= last; ++k) best = std::max(best, kt.max_abs(field.row(k, 0), M));
        return best;
    }
    std::vector<double> sq(M);
    double best = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        std::fill(sq.begin(), sq.end(), 0.0);
        for (std::size_t c = 0; c < field.comps(); ++c) {
            const double* v = field.row(k, c);
            for (std::size_t m = 0; m < M; ++m) sq[m] += v[m] * v[m];
        }
        for (double s : sq) best = std::max(best, s);
    }
    return std::sqrt(best);
}

BmoProfile bmo_profile(const SquaredNormFn& squared_norm, const PathEnsemble& ensemble, const RegressionBasis& basis,
                       std::size_t first, std::size_t last) {
    if (first > last || last >= ensemble.grid.node_count)
        throw Error(ErrorCode::InvalidArgument, "BMO window outside the grid");
    const std::size_t M = ensemble.path_count;
    const double dt = ensemble.grid.step;
    BmoProfile out;
    out.conditional_energy.assign(last - first + 1, 0.0);
    std::vector<double> remaining(M, 0.0), sq(M), fitted(M);
    double best = 0.0;
    for (std::size_t k = last; k-- > first;) {
        squared_norm(k, sq.data());
        for (std::size_t m = 0; m < M; ++m) remaining[m] += sq[m] * dt;
        Regressor(ensemble, k, basis).project(remaining.data(), fitted.data());
        double peak = 0.0;
        for (double v : fitted) peak = std::max(peak, v);
        out.conditional_energy[k - first] = peak;
        best = std::max(best, peak);
    }
    out.norm = std::sqrt(best);
    return out;
}

BmoProfile bmo_profile(const NodeArray& Z, const PathEnsemble& ensemble, const RegressionBasis& basis,
                       std::size_t first, std::size_t last) {
    check_window(Z, first, last);
    return bmo_profile(frobenius(Z), ensemble, basis, first, last);
}

double estimate_bmo_norm(const NodeArray& Z, const PathEnsemble& ensemble, const RegressionBasis& basis,
                         std::size_t first, std::size_t last) {
    return bmo_profile(Z, ensemble, basis, first, last).norm;
}

ExponentialMomentCheck exponential_moment_check(const NodeArray& Z, const PathEnsemble& ensemble, double norm,
                                                std::size_t first, std::size_t last, double tolerance) {
    check_window(Z, first, last);
    ExponentialMomentCheck out;
    out.norm = norm;
    out.tolerance = tolerance;
    out.applicable = norm < 1.0;
    out.bound = out.applicable ? 1.0 / (1.0 - norm * norm) : std::numeric_limits<double>::infinity();
    const std::size_t M = Z.paths();
    const double dt = ensemble.grid.step;
    auto sqnorm = frobenius(Z);
    std::vector<double> remaining(M, 0.0), sq(M), e(M);
    out.sample_moment.assign(last - first + 1, 1.0);
    for (std::size_t k = last; k-- > first;) {
        sqnorm(k, sq.data());
        for (std::size_t m = 0; m < M; ++m) {
            remaining[m] += sq[m] * dt;
            e[m] = std::exp(remaining[m]);
        }
        out.sample_moment[k - first] = blocked_mean(e.data(), M);
    }
    out.worst_moment = *std::max_element(out.sample_moment.begin(), out.sample_moment.end());
    out.pass = out.applicable && out.worst_moment <= out.bound * (1.0 + tolerance);
    return out;
}

}  // namespace absde
