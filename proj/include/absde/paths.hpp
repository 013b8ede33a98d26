#pragma once
// Brownian path ensembles and the node-major array layout shared by the solver.

#include "absde/timegrid.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace absde {

/// Per-path samples of a vector quantity over grid nodes.
/// Layout: data[(node * comps + comp) * paths + path], so one (node, comp)
/// row is contiguous across paths.
class NodeArray {
public:
    NodeArray() = default;
    NodeArray(std::size_t nodes, std::size_t comps, std::size_t paths, double fill = 0.0)
        : nodes_(nodes), comps_(comps), paths_(paths), data_(nodes * comps * paths, fill) {}

    std::size_t nodes() const { return nodes_; }
    std::size_t comps() const { return comps_; }
    std::size_t paths() const { return paths_; }

    double* row(std::size_t node, std::size_t comp) { return data_.data() + (node * comps_ + comp) * paths_; }
    const double* row(std::size_t node, std::size_t comp) const {
        return data_.data() + (node * comps_ + comp) * paths_;
    }
    double& at(std::size_t node, std::size_t comp, std::size_t path) { return row(node, comp)[path]; }
    double at(std::size_t node, std::size_t comp, std::size_t path) const { return row(node, comp)[path]; }

    /// Copies nodes [first, last] from other (same shape).
    void copy_nodes(const NodeArray& other, std::size_t first, std::size_t last);

    const std::vector<double>& raw() const { return data_; }
    bool operator==(const NodeArray&) const = default;

private:
    std::size_t nodes_ = 0, comps_ = 0, paths_ = 0;
    std::vector<double> data_;
};

struct PathEnsemble {
    TimeGrid grid;
    std::size_t path_count = 0;
    std::size_t dimension = 0;
    std::uint64_t seed = 0;
    /// node k holds W(t_{k+1}) - W(t_k); grid.node_count - 1 nodes.
    NodeArray increments;
    /// node k holds W(t_k); W(0) = 0.
    NodeArray states;
};

/// Stream seed for one path; any subset of paths can be regenerated alone.
std::uint64_t path_stream_seed(std::uint64_t seed, std::size_t path);

/// Throws InvalidArgument when M < 2 or d == 0.
PathEnsemble simulate(const TimeGrid& grid, std::size_t paths, std::size_t dimension, std::uint64_t seed);

/// Same Brownian paths observed on a coarser grid (coarse increments are sums
/// of fine ones). The coarse step must be a whole multiple of the fine step
/// and the horizons must match.
PathEnsemble coarsen(const PathEnsemble& fine, const TimeGrid& coarse);

/// First `paths` paths of an ensemble (identical to simulating with that M).
PathEnsemble take_paths(const PathEnsemble& ensemble, std::size_t paths);

}  // namespace absde
