#pragma once
// Reference values for equations with a known solution.

#include <functional>

namespace absde {

/// E g(W_T) for a scalar Brownian motion, by composite Simpson quadrature.
double gaussian_expectation(const std::function<double(double)>& g, double T);

/// Y_0 of Y_t = xi(W_T) + int_t^T (gamma/2) |Z_s|^2 ds:  (1/gamma) ln E exp(gamma xi(W_T)).
double cole_hopf_value(const std::function<double(double)>& xi, double gamma, double T);

/// Y_0 of the deterministic delay equation Y_t = c + int_t^T (a Y_s + b Y_{s+delta}) ds
/// with Y = c on [T, T+delta], on a trapezoid grid of `steps_per_unit` steps.
double linear_delay_value(double a, double b, double c, double T, double delta, int steps_per_unit = 10000);

}  // namespace absde
