#include "absde/paths.hpp"

#include "absde/error.hpp"
#include "absde/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

namespace absde {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void NodeArray::copy_nodes(const NodeArray& other, std::size_t first, std::size_t last) {
    const std::size_t stride = comps_ * paths_;
    std::memcpy(data_.data() + first * stride, other.data_.data() + first * stride,
                (last - first + 1) * stride * sizeof(double));
}

std::uint64_t path_stream_seed(std::uint64_t seed, std::size_t path) {
    return splitmix64(splitmix64(seed) ^ splitmix64(0x5851f42d4c957f2dULL + path));
}

PathEnsemble simulate(const TimeGrid& grid, std::size_t paths, std::size_t dimension, std::uint64_t seed) {
    if (paths < 2) throw Error(ErrorCode::InvalidArgument, "path ensemble needs at least 2 paths");
    if (dimension == 0) throw Error(ErrorCode::InvalidArgument, "Brownian dimension must be positive");

    PathEnsemble e;
    e.grid = grid;
    e.path_count = paths;
    e.dimension = dimension;
    e.seed = seed;
    const std::size_t steps = grid.node_count - 1;
    e.increments = NodeArray(steps, dimension, paths);
    e.states = NodeArray(grid.node_count, dimension, paths);
    const double sd = std::sqrt(grid.step);

    parallel_blocks(paths, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            std::mt19937_64 rng(path_stream_seed(seed, m));
            std::normal_distribution<double> normal(0.0, sd);
            for (std::size_t k = 0; k < steps; ++k)
                for (std::size_t j = 0; j < dimension; ++j) e.increments.at(k, j, m) = normal(rng);
        }
    });
    for (std::size_t k = 0; k < steps; ++k)
        for (std::size_t j = 0; j < dimension; ++j) {
            const double* w = e.states.row(k, j);
            const double* dw = e.increments.row(k, j);
            double* next = e.states.row(k + 1, j);
            for (std::size_t m = 0; m < paths; ++m) next[m] = w[m] + dw[m];
        }
    return e;
}

PathEnsemble coarsen(const PathEnsemble& fine, const TimeGrid& coarse) {
    const TimeGrid& fg = fine.grid;
    const bool aligned = coarse.steps_per_unit > 0 && fg.steps_per_unit % coarse.steps_per_unit == 0 &&
                         std::fabs(coarse.horizon_T - fg.horizon_T) < 1e-12 &&
                         std::fabs(coarse.horizon_K - fg.horizon_K) < 1e-12;
    if (!aligned) throw Error(ErrorCode::InvalidArgument, "coarse grid must divide the fine grid over the same horizons");
    const std::size_t ratio = static_cast<std::size_t>(fg.steps_per_unit / coarse.steps_per_unit);

    PathEnsemble c;
    c.grid = coarse;
    c.path_count = fine.path_count;
    c.dimension = fine.dimension;
    c.seed = fine.seed;
    const std::size_t steps = coarse.node_count - 1;
    const std::size_t M = fine.path_count;
    c.increments = NodeArray(steps, fine.dimension, M);
    c.states = NodeArray(coarse.node_count, fine.dimension, M);
    for (std::size_t j = 0; j < fine.dimension; ++j) {
        for (std::size_t k = 0; k < coarse.node_count; ++k)
            std::copy_n(fine.states.row(k * ratio, j), M, c.states.row(k, j));
        for (std::size_t k = 0; k < steps; ++k) {
            double* out = c.increments.row(k, j);
            std::copy_n(fine.increments.row(k * ratio, j), M, out);
            for (std::size_t r = 1; r < ratio; ++r) {
                const double* add = fine.increments.row(k * ratio + r, j);
                for (std::size_t m = 0; m < M; ++m) out[m] += add[m];
            }
        }
    }
    return c;
}

PathEnsemble take_paths(const PathEnsemble& ensemble, std::size_t paths) {
    if (paths < 2 || paths > ensemble.path_count)
        throw Error(ErrorCode::InvalidArgument, "path subset must hold between 2 and M paths");
    PathEnsemble s;
    s.grid = ensemble.grid;
    s.path_count = paths;
    s.dimension = ensemble.dimension;
    s.seed = ensemble.seed;
    auto cut = [&](const NodeArray& src) {
        NodeArray out(src.nodes(), src.comps(), paths);
        for (std::size_t k = 0; k < src.nodes(); ++k)
            for (std::size_t c = 0; c < src.comps(); ++c) std::copy_n(src.row(k, c), paths, out.row(k, c));
        return out;
    };
    s.increments = cut(ensemble.increments);
    s.states = cut(ensemble.states);
    return s;
}

}  // namespace absde
