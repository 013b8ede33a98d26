#pragma once
// Generators, terminal data and their growth parameters.

#include "absde/expression.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace absde {

/// Structural growth classes a generator can claim.
enum class AssumptionClass {
    LocalQuadratic,        // diagonally quadratic, local existence
    GlobalLinearGrowth,    // |f^i| linear in (y, phi) plus quadratic own row
    GlobalOneSided,        // one-sided growth with anticipated Z, exponential eta moment
    UnboundedLipschitz,    // unbounded terminal data, Lipschitz in (y, phi), convex/concave in z
    UnboundedSplit,        // f(t, z) + g(t, y, z, phi, psi)
};

/// Config spelling of a class ("3.1", "4.1", "4.2", "5.1", "5.3").
std::string_view assumption_key(AssumptionClass c);
std::optional<AssumptionClass> assumption_from_key(std::string_view key);
std::string_view assumption_title(AssumptionClass c);

enum class Convexity { None, Convex, Concave };

/// Growth constants. Unset values stay empty so a check that needs one can
/// report it by name.
struct GrowthParams {
    std::size_t n = 1;
    std::size_t d = 1;
    double T = 1.0;
    std::optional<double> gamma, lambda, lambda0, sigma, sigma0, alpha;
    std::optional<double> M1, M2, M3, M4, C, L;
    /// Moduli rho, rho0; linear x -> slope * x unless a custom function is set.
    std::optional<double> rho_slope, rho0_slope;
    std::function<double(double)> rho_fn, rho0_fn;

    double rho(double x) const;
    double rho0(double x) const;

    /// Value of a named constant; throws MissingParams when unset.
    double require(std::string_view name) const;
    double value_or(std::string_view name, double fallback) const;
    bool has(std::string_view name) const;
    void set(std::string_view name, double value);
    /// Every scalar constant name, in report order.
    static const std::vector<std::string>& names();
};

/// Arguments of one driver evaluation. Arrays are row-major: z and psi are n x d.
struct DriverPoint {
    double t = 0.0;
    const double* w = nullptr;
    const double* y = nullptr;
    const double* z = nullptr;
    const double* phi = nullptr;
    const double* psi = nullptr;
};

/// Writes all n components. Must be pure (called concurrently).
using DriverFn = std::function<void(const DriverPoint&, double* out)>;

struct GeneratorSpec {
    std::string name;
    GrowthParams params;
    DriverFn driver;
    /// Present for split generators; the driver then depends on (t, z) only.
    DriverFn split_g;
    bool uses_anticipated_y = true;
    bool uses_anticipated_z = false;
    std::vector<Convexity> convexity;
    std::optional<AssumptionClass> claimed;

    bool has_split() const { return static_cast<bool>(split_g); }
    void evaluate(const DriverPoint& x, double* out) const { driver(x, out); }
};

/// Terminal data on [T, T+K]: xi writes n values, eta writes n*d (row-major).
struct TerminalData {
    std::function<void(double t, const double* w, double* out)> xi;
    std::function<void(double t, const double* w, double* out)> eta;
    std::string xi_label = "zero";
    std::string eta_label = "zero";
    bool eta_is_zero = true;
};

using Knobs = std::map<std::string, double>;

struct Model {
    GeneratorSpec spec;
    TerminalData terminal;
};

/// zero, constant_drift, cole_hopf, linear_delay, diag_quadratic_delay, split_fg.
/// Knobs missing from the map take their documented defaults; params already
/// set by the caller win over builtin defaults. Throws UnknownBuiltin.
Model builtin(std::string_view name, GrowthParams params, const Knobs& knobs = {});
const std::vector<std::string>& builtin_names();

/// Terminal data: zero, brownian (xi^i = W^i), clipped_brownian (clip to [-1, 1]).
/// Components beyond d reuse W^(i mod d).
TerminalData terminal_builtin(std::string_view name, std::size_t n, std::size_t d);
/// xi from n expressions and eta from n*d expressions of (t, w).
TerminalData terminal_from_expressions(const std::vector<std::string>& xi, const std::vector<std::string>& eta,
                                       std::size_t n, std::size_t d);

/// Driver (and optional split g) from per-component expressions. Dependence
/// on p and q variables sets the anticipated flags.
GeneratorSpec generator_from_expressions(GrowthParams params, const std::vector<std::string>& driver,
                                         const std::vector<std::string>& split_g = {});

struct ValidationReport {
    AssumptionClass assumption{};
    std::size_t samples = 0;
    double radius = 0.0;
    bool pass = false;
    /// Smallest (rhs - lhs) over every inequality and sample.
    double worst_margin = 0.0;
    std::string worst_check;
    /// Sample point of the worst margin: t, w, y, z, phi, psi flattened.
    std::vector<double> witness;
    std::size_t worst_component = 0;
    /// Largest finite-difference ratio |f(x) - f(x')| / |x - x'| seen (informational).
    std::optional<double> lipschitz_probe;
    std::vector<std::string> notes;
};

/// Samples random points with every entry uniform in [-radius, radius]
/// (t uniform on [0, T]) and checks the claimed class with theta replaced by
/// M3 / T. Throws MissingParams when the class needs an unset constant.
ValidationReport validate_growth(const GeneratorSpec& spec, std::size_t samples, double radius, std::uint64_t seed);
ValidationReport validate_growth(const GeneratorSpec& spec, AssumptionClass assumption, std::size_t samples,
                                 double radius, std::uint64_t seed);

}  // namespace absde
