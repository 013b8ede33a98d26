#include "absde/oracle.hpp"

#include "absde/error.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace absde {

double gaussian_expectation(const std::function<double(double)>& g, double T) {
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    // wide range: integrands like exp(a w^2) with a close to 1/(2T) decay slowly
    const double sd = std::sqrt(T);
    const double half_width = 60.0;
    const int intervals = 48000;
    const double h = 2.0 * half_width / intervals;
    double acc = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double x = -half_width + i * h;
        const double weight = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        if (density == 0.0) continue;
        acc += weight * density * g(sd * x);
    }
    return acc * h / 3.0;
}

double cole_hopf_value(const std::function<double(double)>& xi, double gamma, double T) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
    const double m = gaussian_expectation([&](double w) { return std::exp(gamma * xi(w)); }, T);
    return std::log(m) / gamma;
}

double linear_delay_value(double a, double b, double c, double T, double delta, int steps_per_unit) {
    if (!(T > 0.0) || delta < 0.0 || steps_per_unit < 1)
        throw Error(ErrorCode::InvalidArgument, "linear delay oracle needs T > 0, delta >= 0");
    const double h = 1.0 / steps_per_unit;
    const auto N = static_cast<std::size_t>(std::llround(T * steps_per_unit));
    const auto shift = static_cast<std::size_t>(std::llround(delta * steps_per_unit));
    std::vector<double> y(N + shift + 1, c);
    const auto f = [&](std::size_t k) { return a * y[k] + b * y[k + shift]; };
    for (std::size_t k = N; k-- > 0;) {
        // trapezoid step; y[k + shift] is already known when shift > 0
        if (shift == 0) {
            y[k] = y[k + 1] * (1.0 + 0.5 * h * (a + b)) / (1.0 - 0.5 * h * (a + b));
        } else {
            y[k] = (y[k + 1] + 0.5 * h * (f(k + 1) + b * y[k + shift])) / (1.0 - 0.5 * h * a);
        }
    }
    return y[0];
}

}  // namespace absde
