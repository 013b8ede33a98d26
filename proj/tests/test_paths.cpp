#include "absde/error.hpp"
#include "absde/parallel.hpp"
#include "absde/paths.hpp"

#include <doctest.h>

#include <cmath>

using namespace absde;

namespace {
TimeGrid grid(int spu, double K = 0.0) { return build_grid(1.0, K, spu, constant_delay(0.0), constant_delay(0.0)); }
}  // namespace

TEST_CASE("simulation is reproducible and thread independent") {
    const TimeGrid g = grid(20);
    set_thread_count(1);
    const PathEnsemble a = simulate(g, 9000, 2, 7);
    set_thread_count(4);
    const PathEnsemble b = simulate(g, 9000, 2, 7);
    set_thread_count(0);
    CHECK(a.increments == b.increments);
    CHECK(a.states == b.states);
    const PathEnsemble c = simulate(g, 9000, 2, 8);
    CHECK_FALSE(a.increments == c.increments);
}

TEST_CASE("states are cumulative increments starting at zero") {
    const PathEnsemble e = simulate(grid(10, 0.5), 100, 2, 3);
    for (std::size_t m = 0; m < 100; ++m)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(e.states.at(0, j, m) == 0.0);
            for (std::size_t k = 0; k + 1 < e.grid.node_count; ++k)
                CHECK(e.states.at(k + 1, j, m) == e.states.at(k, j, m) + e.increments.at(k, j, m));
        }
}

TEST_CASE("increments have variance dt") {
    const PathEnsemble e = simulate(grid(4), 200000, 1, 11);
    for (std::size_t k = 0; k < 4; ++k) {
        double s = 0, s2 = 0;
        for (std::size_t m = 0; m < e.path_count; ++m) {
            const double x = e.increments.at(k, 0, m);
            s += x;
            s2 += x * x;
        }
        const double mean = s / 200000.0, var = s2 / 200000.0 - mean * mean;
        CHECK(std::fabs(mean) < 5.0 * std::sqrt(0.25 / 200000.0));
        CHECK(std::fabs(var - 0.25) < 5.0 * 0.25 * std::sqrt(2.0 / 200000.0));
    }
}

TEST_CASE("a prefix of paths equals a smaller simulation") {
    const TimeGrid g = grid(8);
    const PathEnsemble big = simulate(g, 5000, 2, 21);
    const PathEnsemble small = simulate(g, 1234, 2, 21);
    const PathEnsemble cut = take_paths(big, 1234);
    CHECK(cut.increments == small.increments);
    CHECK(cut.states == small.states);
}

TEST_CASE("coarsening sums fine increments") {
    const PathEnsemble fine = simulate(grid(8), 50, 1, 5);
    const PathEnsemble coarse = coarsen(fine, grid(2));
    for (std::size_t m = 0; m < 50; ++m)
        for (std::size_t k = 0; k <= 2; ++k) CHECK(coarse.states.at(k, 0, m) == fine.states.at(4 * k, 0, m));
    for (std::size_t m = 0; m < 50; ++m) {
        const double sum = fine.increments.at(0, 0, m) + fine.increments.at(1, 0, m) + fine.increments.at(2, 0, m) +
                           fine.increments.at(3, 0, m);
        CHECK(coarse.increments.at(0, 0, m) == doctest::Approx(sum).epsilon(1e-14));
    }
}

TEST_CASE("too few paths is an error") {
    CHECK_THROWS_AS(simulate(grid(4), 1, 1, 0), Error);
    CHECK_THROWS_AS(simulate(grid(4), 10, 0, 0), Error);
}
