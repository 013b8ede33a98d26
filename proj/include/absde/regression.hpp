#pragma once
// Least-squares conditional expectations E[ . | W(t_k)] over a path ensemble.

#include "absde/paths.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace absde {

enum class BasisKind { Polynomial, Bins };

struct RegressionBasis {
    BasisKind kind = BasisKind::Polynomial;
    /// Total degree for polynomials, bin count for bins.
    int degree_or_bins = 3;
    /// Ridge added to the scaled normal equations; unused by bins.
    double ridge = 1e-10;
};

/// Fit at one node. Polynomial bases use monomials of the standardized state
/// with centered columns and an unpenalized intercept; coordinates with zero
/// spread (t = 0) are dropped. Bins split paths into equal-count groups along
/// the first state coordinate, never separating tied values.
///
/// Every reduction runs over fixed path blocks summed in block order, so fits
/// are identical for any thread count.
class Regressor {
public:
    Regressor(const PathEnsemble& ensemble, std::size_t index, const RegressionBasis& basis);

    /// Fitted values at every path. Values that are all equal come back unchanged.
    void project(const double* values, double* out) const;
    std::vector<double> project(std::span<const double> values) const;

    /// Basis functions excluding the intercept (0 for bins).
    std::size_t feature_count() const { return features_.size(); }
    std::size_t bin_count() const { return bin_sizes_.size(); }
    std::size_t paths() const { return paths_; }
    /// Centered feature column (polynomial bases).
    const std::vector<double>& feature(std::size_t j) const { return features_[j]; }

private:
    void project_polynomial(const double* values, double* out) const;
    void project_bins(const double* values, double* out) const;

    BasisKind kind_;
    std::size_t paths_;
    std::vector<std::vector<double>> features_;
    std::vector<double> chol_;  // lower factor, row-major P x P
    std::vector<std::size_t> order_;     // paths sorted along the first coordinate
    std::vector<std::size_t> bin_sizes_;  // consecutive runs of order_
};

/// Throws SingularRegression for a rank-deficient fit with zero ridge.
std::vector<double> conditional_expectation(const PathEnsemble& ensemble, std::span<const double> values,
                                            std::size_t at_index, const RegressionBasis& basis);

/// Deterministic blocked mean of n values.
double blocked_mean(const double* values, std::size_t n);

}  // namespace absde
