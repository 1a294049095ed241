#ifndef WEX_OPERATOR_HPP_
#define WEX_OPERATOR_HPP_

#include "wex/grid.hpp"

namespace wex {

enum class Backend { direct, fft };

Backend backend_from_string(const std::string& s);
std::string to_string(Backend b);

struct OperatorConfig {
    Backend backend = Backend::fft;
    bool renormalize_output = true;
    double conv_mass_tol = 1e-6;
    double mean_drift_tol = 1e-3;
};

/// Self-convolution c(s) = (f*f)(s) sampled at s_k = k*h, k = 0..2n-2,
/// on the doubled support [0, 2*x_max]. `base` is the density grid.
struct ConvolutionField {
    Grid base;
    Eigen::ArrayXd values;

    double s(int k) const { return k * base.h; }
    int size() const { return static_cast<int>(values.size()); }
};

/// Trapezoid mass of c over [0, 2*x_max].
double conv_mass(const ConvolutionField& c);

/// Density of the pooled wealth s = u + v:
///   c(s_k) = trapezoid_u of f(u) f(s_k - u) over [0, s_k],  c(0) = 0.
/// The direct backend evaluates the quadrature sum; the fft backend folds the
/// endpoint half-weights into a zero-padded linear convolution so both
/// backends realize the same rule (sup-norm agreement within 1e-10).
/// Requires a normalized input.
ConvolutionField self_convolve(const DensityField& f, Backend backend);

/// g(x_i) = trapezoid of c(s)/s over [x_i, 2*x_max], restricted to the
/// density grid. The integrand at s = 0 has the removable limit f(0)^2,
/// estimated here by extrapolating c(s_1)/s_1.
DensityField tail_weighted_integral(const ConvolutionField& c);

struct ApplyDiagnostics {
    double raw_mass = 0.0;       // trapezoid mass of T[f] before renormalization
    double mass_deficit = 0.0;   // 1 - raw_mass, the truncation leakage
    double conv_mass = 0.0;      // trapezoid mass of the self-convolution
    bool conv_mass_within_tol = false;
    double mean_in = 0.0;
    double mean_out = 0.0;
};

struct ApplyResult {
    DensityField density;
    ApplyDiagnostics diagnostics;
};

/// One application of the wealth-exchange operator,
///   T[f](x) = integral over {u+v > x} of f(u) f(v) / (u+v),
/// computed as tail_weighted_integral(self_convolve(f)). Renormalizes the
/// output when configured (mean is never adjusted; drift beyond
/// mean_drift_tol throws instead).
ApplyResult apply_operator(const DensityField& f, const OperatorConfig& cfg = {});

}  // namespace wex

#endif  // WEX_OPERATOR_HPP_
