#pragma once
// Uniform grid on [0, T+K] with the anticipation maps t -> t + delta_t and
// t -> t + zeta_t resolved to node indices.

#include <cstddef>
#include <functional>
#include <vector>

namespace absde {

/// Deterministic nonnegative delay as a function of time on [0, T].
using DelayFn = std::function<double(double)>;

DelayFn constant_delay(double value);

struct TimeGrid {
    double horizon_T = 0.0;
    double horizon_K = 0.0;
    double step = 0.0;
    int steps_per_unit = 0;
    std::size_t node_count = 0;
    std::size_t terminal_index = 0;
    /// Indexed by k in [0, terminal_index].
    std::vector<std::size_t> delta_map;
    std::vector<std::size_t> zeta_map;
    double domination_L = 1.0;

    double time(std::size_t k) const { return static_cast<double>(k) * step; }
    std::size_t last_index() const { return node_count - 1; }
    /// Nearest node, ties rounding up, clamped to the last node.
    std::size_t nearest_index(double t) const;
};

/// Throws InvalidResolution when T or K is not a whole number of steps, and
/// AnticipationOutOfRange when an anticipated time lands past T+K by more
/// than half a step.
TimeGrid build_grid(double T, double K, int steps_per_unit, const DelayFn& delta, const DelayFn& zeta);

/// Largest number of source nodes sharing one target, over both maps, floored at 1.
double discrete_domination(const TimeGrid& grid);

}  // namespace absde
