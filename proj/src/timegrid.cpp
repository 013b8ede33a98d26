#include "absde/timegrid.hpp"

#include "absde/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace absde {
namespace {

std::size_t whole_steps(double horizon, int steps_per_unit, const char* what) {
    const double raw = horizon * steps_per_unit;
    const double rounded = std::round(raw);
    if (!std::isfinite(raw) || std::fabs(raw - rounded) > 1e-9 * std::max(1.0, std::fabs(raw))) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s=%.17g is not a whole number of steps at %d steps per unit", what,
                      horizon, steps_per_unit);
        throw Error(ErrorCode::InvalidResolution, buf);
    }
    return static_cast<std::size_t>(rounded);
}

std::vector<std::size_t> resolve(const TimeGrid& g, const DelayFn& shift, const char* name) {
    std::vector<std::size_t> map(g.terminal_index + 1);
    const double end = g.horizon_T + g.horizon_K;
    for (std::size_t k = 0; k <= g.terminal_index; ++k) {
        const double t = g.time(k);
        const double s = shift ? shift(t) : 0.0;
        if (!std::isfinite(s) || s < 0.0) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s(%.17g) = %.17g must be finite and nonnegative", name, t, s);
            throw Error(ErrorCode::InvalidArgument, buf);
        }
        if (t + s > end + 0.5 * g.step) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "t=%.17g: t+%s=%.17g exceeds T+K=%.17g", t, name, t + s, end);
            throw Error(ErrorCode::AnticipationOutOfRange, buf);
        }
        map[k] = std::max(k, g.nearest_index(t + s));
    }
    return map;
}

}  // namespace

DelayFn constant_delay(double value) {
    return [value](double) { return value; };
}

std::size_t TimeGrid::nearest_index(double t) const {
    const double x = std::floor(t / step + 0.5 + 1e-9);
    if (x <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(x), last_index());
}

TimeGrid build_grid(double T, double K, int steps_per_unit, const DelayFn& delta, const DelayFn& zeta) {
    if (!(T > 0.0) || !(K >= 0.0) || steps_per_unit <= 0)
        throw Error(ErrorCode::InvalidArgument, "grid needs T > 0, K >= 0 and steps_per_unit > 0");
    TimeGrid g;
    g.horizon_T = T;
    g.horizon_K = K;
    g.steps_per_unit = steps_per_unit;
    g.step = 1.0 / steps_per_unit;
    g.terminal_index = whole_steps(T, steps_per_unit, "T");
    g.node_count = g.terminal_index + whole_steps(K, steps_per_unit, "K") + 1;
    g.delta_map = resolve(g, delta, "delta");
    g.zeta_map = resolve(g, zeta, "zeta");
    g.domination_L = discrete_domination(g);
    return g;
}

double discrete_domination(const TimeGrid& grid) {
    std::size_t worst = 1;
    for (const auto* map : {&grid.delta_map, &grid.zeta_map}) {
        std::map<std::size_t, std::size_t> hits;
        for (std::size_t target : *map) worst = std::max(worst, ++hits[target]);
    }
    return static_cast<double>(worst);
}

}  // namespace absde
