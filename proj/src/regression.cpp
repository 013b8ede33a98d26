#include "absde/regression.hpp"

#include "absde/error.hpp"
#include "absde/kernels.hpp"
#include "absde/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace absde {
namespace {

double blocked_dot(const double* x, const double* y, std::size_t n) {
    const auto& kt = kernels::active();
    std::vector<double> partial(block_count(n), 0.0);
    parallel_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) {
        partial[b] = kt.dot(x + begin, y + begin, end - begin);
    });
    double acc = 0.0;
    for (double p : partial) acc += p;
    return acc;
}

bool all_equal(const double* v, std::size_t n) {
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] != v[0]) return false;
    return true;
}

using Exponents = std::vector<int>;

/// Monomials of total degree 1..degree in `dims` variables, graded.
std::vector<Exponents> monomials(std::size_t dims, int degree) {
    std::vector<Exponents> out;
    std::vector<Exponents> layer{Exponents(dims, 0)};
    for (int deg = 1; deg <= degree; ++deg) {
        std::vector<Exponents> next;
        for (const auto& e : layer) {
            // extend only at or after the last nonzero slot so each monomial appears once
            std::size_t start = 0;
            for (std::size_t c = 0; c < dims; ++c)
                if (e[c] > 0) start = c;
            for (std::size_t c = start; c < dims; ++c) {
                Exponents f = e;
                ++f[c];
                next.push_back(f);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

}  // namespace

double blocked_mean(const double* values, std::size_t n) {
    const auto& kt = kernels::active();
    std::vector<double> partial(block_count(n), 0.0);
    parallel_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) {
        partial[b] = kt.sum(values + begin, end - begin);
    });
    double acc = 0.0;
    for (double p : partial) acc += p;
    return acc / static_cast<double>(n);
}

Regressor::Regressor(const PathEnsemble& ensemble, std::size_t index, const RegressionBasis& basis)
    : kind_(basis.kind), paths_(ensemble.path_count) {
    if (index >= ensemble.states.nodes()) throw Error(ErrorCode::InvalidArgument, "regression index beyond the grid");
    if (basis.degree_or_bins < 0 || (basis.kind == BasisKind::Bins && basis.degree_or_bins < 1))
        throw Error(ErrorCode::InvalidArgument, "basis size must be positive");
    if (!(basis.ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge must be nonnegative");
    const std::size_t M = paths_;
    const auto& kt = kernels::active();

    if (kind_ == BasisKind::Bins) {
        const std::size_t bins = static_cast<std::size_t>(basis.degree_or_bins);
        if (bins > M && basis.ridge == 0.0)
            throw Error(ErrorCode::SingularRegression, "more bins than paths leaves empty cells");
        const double* w = ensemble.states.row(index, 0);
        order_.resize(M);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [w](std::size_t a, std::size_t b) { return w[a] < w[b]; });
        const std::size_t target = std::min(bins, M);
        std::size_t pos = 0;
        for (std::size_t b = 1; b <= target && pos < M; ++b) {
            std::size_t cut = b == target ? M : (b * M) / target;
            if (cut <= pos) continue;
            while (cut < M && w[order_[cut]] == w[order_[cut - 1]]) ++cut;
            bin_sizes_.push_back(cut - pos);
            pos = cut;
        }
        return;
    }

    // standardized coordinates with nonzero spread
    std::vector<std::vector<double>> coords;
    for (std::size_t j = 0; j < ensemble.dimension; ++j) {
        const double* w = ensemble.states.row(index, j);
        if (all_equal(w, M)) continue;
        const double mean = blocked_mean(w, M);
        std::vector<double> u(M);
        kt.affine(w, 1.0, -mean, u.data(), M);
        const double sd = std::sqrt(blocked_dot(u.data(), u.data(), M) / static_cast<double>(M));
        if (!(sd > 0.0)) continue;
        kt.affine(u.data(), 1.0 / sd, 0.0, u.data(), M);
        coords.push_back(std::move(u));
    }
    if (coords.empty() || basis.degree_or_bins == 0) return;

    const auto exps = monomials(coords.size(), basis.degree_or_bins);
    std::map<Exponents, std::size_t> column_of;
    std::vector<std::vector<double>> raw;
    raw.reserve(exps.size());
    for (const auto& e : exps) {
        std::vector<double> col(M);
        int total = 0;
        std::size_t last = 0;
        for (std::size_t c = 0; c < e.size(); ++c) {
            total += e[c];
            if (e[c] > 0) last = c;
        }
        if (total == 1) {
            col = coords[last];
        } else {
            Exponents parent = e;
            --parent[last];
            kt.mul(raw[column_of.at(parent)].data(), coords[last].data(), col.data(), M);
        }
        column_of[e] = raw.size();
        raw.push_back(std::move(col));
    }
    const std::size_t P = raw.size();
    for (auto& col : raw) kt.affine(col.data(), 1.0, -blocked_mean(col.data(), M), col.data(), M);

    std::vector<double> gram(P * P, 0.0);
    std::vector<double> partial(block_count(M) * P * P, 0.0);
    parallel_blocks(M, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double* g = partial.data() + b * P * P;
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j <= i; ++j) g[i * P + j] = kt.dot(raw[i].data() + begin, raw[j].data() + begin, end - begin);
    });
    for (std::size_t b = 0; b < block_count(M); ++b)
        for (std::size_t i = 0; i < P * P; ++i) gram[i] += partial[b * P * P + i];
    double max_diag = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j <= i; ++j) gram[i * P + j] /= static_cast<double>(M);
        max_diag = std::max(max_diag, gram[i * P + i]);
        gram[i * P + i] += basis.ridge;
    }

    // Cholesky, lower triangle
    chol_.assign(P * P, 0.0);
    const double floor = 1e-12 * std::max(1.0, max_diag);
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = gram[i * P + j];
            for (std::size_t k = 0; k < j; ++k) s -= chol_[i * P + k] * chol_[j * P + k];
            if (i == j) {
                if (!(s > (basis.ridge == 0.0 ? floor : 0.0))) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "normal equations at node %zu are rank-deficient (pivot %.3g)",
                                  index, s);
                    throw Error(ErrorCode::SingularRegression, buf);
                }
                chol_[i * P + i] = std::sqrt(s);
            } else {
                chol_[i * P + j] = s / chol_[j * P + j];
            }
        }
    }
    features_ = std::move(raw);
}

void Regressor::project(const double* values, double* out) const {
    if (all_equal(values, paths_)) {
        std::copy_n(values, paths_, out);
        return;
    }
    if (kind_ == BasisKind::Bins)
        project_bins(values, out);
    else
        project_polynomial(values, out);
}

std::vector<double> Regressor::project(std::span<const double> values) const {
    if (values.size() != paths_) throw Error(ErrorCode::InvalidArgument, "one value per path expected");
    std::vector<double> out(paths_);
    project(values.data(), out.data());
    return out;
}

void Regressor::project_polynomial(const double* values, double* out) const {
    const std::size_t M = paths_;
    const std::size_t P = features_.size();
    const double mean = blocked_mean(values, M);
    std::vector<double> beta(P, 0.0);
    if (P > 0) {
        const auto& kt = kernels::active();
        std::vector<double> partial(block_count(M) * P, 0.0);
        parallel_blocks(M, [&](std::size_t b, std::size_t begin, std::size_t end) {
            for (std::size_t j = 0; j < P; ++j)
                partial[b * P + j] = kt.dot(features_[j].data() + begin, values + begin, end - begin);
        });
        for (std::size_t b = 0; b < block_count(M); ++b)
            for (std::size_t j = 0; j < P; ++j) beta[j] += partial[b * P + j];
        for (double& v : beta) v /= static_cast<double>(M);
        for (std::size_t i = 0; i < P; ++i) {
            double s = beta[i];
            for (std::size_t k = 0; k < i; ++k) s -= chol_[i * P + k] * beta[k];
            beta[i] = s / chol_[i * P + i];
        }
        for (std::size_t i = P; i-- > 0;) {
            double s = beta[i];
            for (std::size_t k = i + 1; k < P; ++k) s -= chol_[k * P + i] * beta[k];
            beta[i] = s / chol_[i * P + i];
        }
    }
    const auto& kt = kernels::active();
    parallel_blocks(M, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::fill(out + begin, out + end, mean);
        for (std::size_t j = 0; j < P; ++j) kt.axpy(beta[j], features_[j].data() + begin, out + begin, end - begin);
    });
}

void Regressor::project_bins(const double* values, double* out) const {
    std::size_t pos = 0;
    for (std::size_t size : bin_sizes_) {
        double sum = 0.0;
        for (std::size_t i = pos; i < pos + size; ++i) sum += values[order_[i]];
        const double mean = sum / static_cast<double>(size);
        for (std::size_t i = pos; i < pos + size; ++i) out[order_[i]] = mean;
        pos += size;
    }
}

std::vector<double> conditional_expectation(const PathEnsemble& ensemble, std::span<const double> values,
                                            std::size_t at_index, const RegressionBasis& basis) {
    return Regressor(ensemble, at_index, basis).project(values);
}

}  // namespace absde
