#pragma once
// Closed-form constants of the existence theory, evaluated in log space.

#include "absde/model.hpp"
#include "absde/paths.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace absde {

/// A real number kept as sign * exp(log_abs). `overflow` marks magnitudes
/// above 1e300; value() is then +-inf and the log is what gets reported.
struct BoundValue {
    double sign = 0.0;
    double log_abs = -std::numeric_limits<double>::infinity();

    static BoundValue of(double v);
    static BoundValue from_log(double log_abs, double sign = 1.0);
    double value() const;
    bool overflow() const;
    /// "%.17g" of the value, or "exp(<log>)" when it overflows.
    std::string str() const;
};

BoundValue operator+(BoundValue a, BoundValue b);
BoundValue operator*(BoundValue a, BoundValue b);
BoundValue operator/(BoundValue a, BoundValue b);
BoundValue pow(BoundValue a, double p);

struct LocalConstants {
    double K1 = 0.0;
    BoundValue K2;
    /// K2 with the 4*M2 coefficient used inside the existence proof.
    BoundValue K2_proof;
    BoundValue D;
    BoundValue x1, x2, x0, epsilon;
};

struct GlobalConstants {
    BoundValue Q1;
    /// Q1 from the general (4n)^m formula, also for sigma + sigma0 = 0.
    BoundValue Q1_general;
    int Q1_terms = 0;
    BoundValue Q2;
    double epsilon0 = 0.0;
    int m0 = 1;
    BoundValue C1, C2, M5, Q3, Q4;
    int Q3_terms = 0;
    double kappa0_max = 0.0;  // +inf when lambda0 = 0
    double q = 2.0;
    double Rq = 0.0;
    bool negative_log = false;  // 3888 M4^4 / gamma < 1
};

/// Needs gamma, lambda, lambda0, alpha, M1, M2, M3, L, rho, rho0.
LocalConstants local_constants(const GrowthParams& params);

/// Needs gamma, lambda, lambda0, sigma, sigma0, alpha, M1, M2, M3, M4, L.
/// `kappa` is the splice window length used for m0 (defaults to T).
GlobalConstants global_constants(const GrowthParams& params, double q, std::optional<double> kappa = std::nullopt);

double R_of_q(double q);

/// Window-size limit for splicing under one-sided growth with anticipated Z
/// (+inf when lambda0 = 0). Needs gamma, lambda0, sigma, sigma0, L.
double kappa0_limit(const GrowthParams& params);

struct IqEstimate {
    BoundValue value;
    /// Standard error of the Monte Carlo mean, same scale as value.
    BoundValue std_error;
    std::size_t paths = 0;
};

/// R(2q) * mean over paths of exp(8 n q gamma (xi* + Gamma_bar)), xi* the
/// per-path max of |xi| over the terminal segment.
IqEstimate estimate_Iq(const GrowthParams& params, double q, const TerminalData& terminal,
                       const PathEnsemble& ensemble, double gamma_integral_bound);

struct BoundReport {
    GrowthParams inputs;
    std::optional<LocalConstants> local;
    std::optional<GlobalConstants> global;
    std::optional<IqEstimate> Iq;
    std::vector<std::string> notes;
};

/// Flat "name = value" lines, one constant per line.
std::string format_bound_report(const BoundReport& report);
/// Two-column CSV (constant,value).
std::string bound_report_csv(const BoundReport& report);

}  // namespace absde
