#pragma once
// Sample estimators for the sup norm and the BMO norm of path fields.
//
// Both are approximations: the essential supremum becomes a max over the
// finite ensemble, and the supremum over stopping times becomes a max over
// grid times, which makes the BMO figure a lower estimate.

#include "absde/paths.hpp"
#include "absde/regression.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace absde {

/// Max over paths and nodes in [first, last] of the Euclidean norm across components.
double estimate_sup_norm(const NodeArray& field, std::size_t first, std::size_t last);

struct BmoProfile {
    /// Per node k in [first, last]: max over paths of E_k[sum_{j>=k} |Z_j|^2 dt], floored at 0.
    std::vector<double> conditional_energy;
    /// sqrt of the max of conditional_energy.
    double norm = 0.0;
};

/// Fills sq[m] with |Z_k|^2 for every path at node k.
using SquaredNormFn = std::function<void(std::size_t k, double* sq)>;

BmoProfile bmo_profile(const SquaredNormFn& squared_norm, const PathEnsemble& ensemble, const RegressionBasis& basis,
                       std::size_t first, std::size_t last);

/// Z stored as a NodeArray with any number of components (Frobenius norm per node).
double estimate_bmo_norm(const NodeArray& Z, const PathEnsemble& ensemble, const RegressionBasis& basis,
                         std::size_t first, std::size_t last);
BmoProfile bmo_profile(const NodeArray& Z, const PathEnsemble& ensemble, const RegressionBasis& basis,
                       std::size_t first, std::size_t last);

struct ExponentialMomentCheck {
    double norm = 0.0;          // BMO estimate fed in
    double bound = 0.0;         // 1 / (1 - norm^2), infinite when norm >= 1
    double tolerance = 0.05;    // relative Monte Carlo slack
    std::vector<double> sample_moment;  // per node: mean over paths of exp(sum_{j>=k} |Z_j|^2 dt)
    double worst_moment = 0.0;
    bool applicable = false;    // norm < 1
    bool pass = false;
};

/// Exponential moment of the remaining quadratic variation against the
/// John-Nirenberg bound for a BMO martingale of norm < 1.
ExponentialMomentCheck exponential_moment_check(const NodeArray& Z, const PathEnsemble& ensemble, double norm,
                                                std::size_t first, std::size_t last, double tolerance = 0.05);

}  // namespace absde
