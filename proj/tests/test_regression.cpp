#include "absde/error.hpp"
#include "absde/parallel.hpp"
#include "absde/regression.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace absde;

namespace {

PathEnsemble ensemble(std::size_t M, std::size_t d = 1, int spu = 10, std::uint64_t seed = 3) {
    return simulate(build_grid(1.0, 0.0, spu, constant_delay(0.0), constant_delay(0.0)), M, d, seed);
}

std::vector<double> state(const PathEnsemble& e, std::size_t k, std::size_t j = 0) {
    return {e.states.row(k, j), e.states.row(k, j) + e.path_count};
}

}  // namespace

TEST_CASE("constants are returned unchanged") {
    const PathEnsemble e = ensemble(5000);
    const std::vector<double> c(5000, 1.2345678901234567);
    for (std::size_t k : {0ul, 3ul, 10ul}) CHECK(conditional_expectation(e, c, k, {}) == c);
}

TEST_CASE("a value in the basis span is reproduced") {
    const PathEnsemble e = ensemble(20000);
    const auto w = state(e, 5);
    std::vector<double> v(w.size());
    for (std::size_t m = 0; m < w.size(); ++m) v[m] = 1.5 - 2.0 * w[m] + 0.25 * w[m] * w[m] * w[m];
    const auto fit = conditional_expectation(e, v, 5, {});
    for (std::size_t m = 0; m < w.size(); ++m) CHECK(fit[m] == doctest::Approx(v[m]).epsilon(1e-8));
}

TEST_CASE("E[W_T | W_t] is close to W_t") {
    const PathEnsemble e = ensemble(100000);
    const auto wT = state(e, 10), wt = state(e, 4);
    RegressionBasis b;
    b.degree_or_bins = 1;
    const auto fit = conditional_expectation(e, wT, 4, b);
    double err = 0;
    for (std::size_t m = 0; m < fit.size(); ++m) err = std::max(err, std::fabs(fit[m] - wt[m]));
    CHECK(err < 0.02);
}

TEST_CASE("projection is linear and residuals are orthogonal to features") {
    const PathEnsemble e = ensemble(30000, 2);
    const Regressor r(e, 6, {});
    const auto x = state(e, 10, 0), y = state(e, 10, 1);
    std::vector<double> v(x.size()), combo(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) {
        v[m] = std::sin(x[m]) + y[m] * y[m];
        combo[m] = 2.0 * v[m] - 3.0 * x[m];
    }
    const auto pv = r.project(v), px = r.project(x), pc = r.project(combo);
    for (std::size_t m = 0; m < x.size(); ++m)
        CHECK(pc[m] == doctest::Approx(2.0 * pv[m] - 3.0 * px[m]).epsilon(1e-9));
    double mean_res = 0;
    for (std::size_t m = 0; m < v.size(); ++m) mean_res += v[m] - pv[m];
    CHECK(std::fabs(mean_res / v.size()) < 1e-10);
    for (std::size_t j = 0; j < r.feature_count(); ++j) {
        const auto& f = r.feature(j);
        double dot = 0, norm = 0;
        for (std::size_t m = 0; m < v.size(); ++m) {
            dot += f[m] * (v[m] - pv[m]);
            norm += f[m] * f[m];
        }
        CHECK(std::fabs(dot) / std::sqrt(norm * v.size()) < 1e-6);
    }
}

TEST_CASE("tower property for nested conditioning") {
    const PathEnsemble e = ensemble(50000);
    const auto wT = state(e, 10);
    std::vector<double> v(wT.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = wT[m] * wT[m];
    const auto at7 = conditional_expectation(e, v, 7, {});
    const auto direct = conditional_expectation(e, v, 3, {});
    const auto nested = conditional_expectation(e, at7, 3, {});
    double sq = 0;
    for (std::size_t m = 0; m < v.size(); ++m) sq += (direct[m] - nested[m]) * (direct[m] - nested[m]);
    CHECK(std::sqrt(sq / v.size()) < 0.02);
}

TEST_CASE("bins average within equal-count groups") {
    const PathEnsemble e = ensemble(1000);
    RegressionBasis b;
    b.kind = BasisKind::Bins;
    b.degree_or_bins = 4;
    const Regressor r(e, 5, b);
    CHECK(r.bin_count() == 4);
    const auto w = state(e, 5);
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto c) { return w[a] < w[c]; });
    std::vector<double> v(w.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = std::cos(3.0 * w[m]) + double(m % 7);
    const auto fit = r.project(v);
    for (std::size_t bin = 0; bin < 4; ++bin) {
        double mean = 0;
        for (std::size_t i = bin * 250; i < (bin + 1) * 250; ++i) mean += v[order[i]];
        mean /= 250.0;
        for (std::size_t i = bin * 250; i < (bin + 1) * 250; ++i) CHECK(fit[order[i]] == doctest::Approx(mean));
    }
}

TEST_CASE("too many bins without ridge is singular") {
    const PathEnsemble e = ensemble(10);
    RegressionBasis b;
    b.kind = BasisKind::Bins;
    b.degree_or_bins = 11;
    b.ridge = 0.0;
    try {
        Regressor r(e, 5, b);
        FAIL("expected SingularRegression");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::SingularRegression);
    }
}

TEST_CASE("rank-deficient polynomial fit without ridge is singular") {
    // 3 paths cannot support a cubic in one variable
    const PathEnsemble e = ensemble(3);
    RegressionBasis b;
    b.ridge = 0.0;
    const std::vector<double> v{1.0, 2.0, 4.0};
    try {
        conditional_expectation(e, v, 5, b);
        FAIL("expected SingularRegression");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::SingularRegression);
    }
}

TEST_CASE("fits do not depend on the thread count") {
    const PathEnsemble e = ensemble(20000, 2);
    const auto v = state(e, 10, 1);
    set_thread_count(1);
    const auto a = conditional_expectation(e, v, 4, {});
    set_thread_count(5);
    const auto b = conditional_expectation(e, v, 4, {});
    set_thread_count(0);
    CHECK(a == b);
}
