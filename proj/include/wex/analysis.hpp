#ifndef WEX_ANALYSIS_HPP_
#define WEX_ANALYSIS_HPP_

#include "wex/grid.hpp"

#include <span>
#include <vector>

namespace wex {

/// Goodness-of-fit summary against the maximum-likelihood exponential.
/// kl is +infinity (kl_finite == false) when the reference vanishes on the
/// support of the field; that is a reportable outcome, not an error.
struct FitReport {
    double rate_mle = 0.0;
    double ks = 0.0;
    double l1 = 0.0;
    double kl = 0.0;
    double gini = 0.0;
    bool kl_finite = true;
};

/// Trapezoid integral of |f - g| on a common grid.
double l1_distance(const DensityField& f, const DensityField& g);

/// max_i |f_i - g_i| on a common grid.
double sup_distance(const DensityField& f, const DensityField& g);

/// Trapezoid integral of f*ln(f/g) over {f > 0}, with 0*ln(0/.) = 0.
/// Returns +infinity when g = 0 somewhere f > 0.
double kl_divergence(const DensityField& f, const DensityField& g);

/// Two-sided Kolmogorov-Smirnov statistic of the samples against
/// Exp(rate): sup over order statistics of |empirical CDF - (1 - e^{-rate x})|.
/// The input need not be pre-sorted.
double ks_statistic(std::span<const double> samples, double rate);

/// Gini coefficient sum_ij |w_i - w_j| / (2 N^2 mean), via the sorted
/// O(N log N) identity. Scale-free.
double gini(std::span<const double> wealths);

/// Piecewise-linear CDF of a density field (cumulative trapezoid).
Eigen::ArrayXd cumulative_trapezoid(const DensityField& f);

FitReport fit_exponential(const DensityField& f);
FitReport fit_exponential(std::span<const double> samples);

}  // namespace wex

#endif  // WEX_ANALYSIS_HPP_
