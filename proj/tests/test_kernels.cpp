#include "absde/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace absde;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 3.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
    const auto all = kernels::available();
    REQUIRE(!all.empty());
    CHECK(all.front()->name == "scalar");
    CHECK(kernels::select("scalar"));
    CHECK(kernels::active().name == "scalar");
    CHECK_FALSE(kernels::select("no-such-variant"));
}

TEST_CASE("every variant matches the scalar reference") {
    const auto& ref = kernels::scalar_table();
    for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 9ul, 33ul, 4096ul, 10001ul}) {
        const auto x = random_vector(n, 11 + n), y = random_vector(n, 97 + n);
        for (const auto* t : kernels::available()) {
            CAPTURE(t->name);
            CAPTURE(n);
            const double scale = 1.0 + std::sqrt(static_cast<double>(n)) * 9.0;
            CHECK(std::fabs(t->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= 1e-12 * scale);
            CHECK(std::fabs(t->sum(x.data(), n) - ref.sum(x.data(), n)) <= 1e-12 * scale);

            std::vector<double> a(n), b(n);
            t->mul(x.data(), y.data(), a.data(), n);
            ref.mul(x.data(), y.data(), b.data(), n);
            CHECK(a == b);
            t->affine(x.data(), 0.37, -1.25, a.data(), n);
            ref.affine(x.data(), 0.37, -1.25, b.data(), n);
            CHECK(a == b);
            CHECK(t->max_abs(x.data(), n) == ref.max_abs(x.data(), n));

            std::vector<double> ya = y, yb = y;
            t->axpy(-0.7, x.data(), ya.data(), n);
            ref.axpy(-0.7, x.data(), yb.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(ya[i] - yb[i]) <= 1e-15 * (1.0 + std::fabs(yb[i])));
        }
    }
}

TEST_CASE("max_abs skips NaN like the reference loop") {
    std::vector<double> v{1.0, std::numeric_limits<double>::quiet_NaN(), -5.0, 2.0, 0.5, -0.25, 3.0, 1.0, 4.0};
    for (const auto* t : kernels::available()) {
        CAPTURE(t->name);
        CHECK(t->max_abs(v.data(), v.size()) == 5.0);
    }
}
