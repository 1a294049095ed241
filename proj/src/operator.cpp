#include "wex/operator.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace wex {

Backend backend_from_string(const std::string& s) {
    if (s == "direct") return Backend::direct;
    if (s == "fft") return Backend::fft;
    throw std::invalid_argument("wex::backend_from_string: unknown backend '" + s +
                                "' (expected direct|fft)");
}

std::string to_string(Backend b) { return b == Backend::direct ? "direct" : "fft"; }

double conv_mass(const ConvolutionField& c) { return trapezoid(c.values, c.base.h); }

namespace {

void require_normalized(const DensityField& f, const char* where) {
    const double mass = trapezoid_mass(f);
    if (std::abs(mass - 1.0) > kDefaultMassTol) {
        throw std::invalid_argument(std::string("wex::") + where +
                                    ": input must be normalized, trapezoid mass is " +
                                    std::to_string(mass));
    }
}

// c_k = h * [ sum_j f_j f_{k-j} - f_0 f_k ]: the plain discrete convolution
// with the trapezoid endpoint half-weights folded into the f_0 f_k term
// (the integrand at u = 0 and u = s_k is f_0 f_k both times).
Eigen::ArrayXd convolve_direct(const Eigen::ArrayXd& f, double h) {
    const int n = static_cast<int>(f.size());
    const int m = 2 * n - 1;
    Eigen::ArrayXd c = Eigen::ArrayXd::Zero(m);
    for (int k = 1; k < m; ++k) {
        const int jlo = std::max(0, k - (n - 1));
        const int jhi = std::min(k, n - 1);
        double acc = 0.0;
        for (int j = jlo; j <= jhi; ++j) acc += f[j] * f[k - j];
        if (k <= n - 1) acc -= f[0] * f[k];
        c[k] = std::max(0.0, h * acc);
    }
    return c;
}

Eigen::ArrayXd convolve_fft(const Eigen::ArrayXd& f, double h) {
    const int n = static_cast<int>(f.size());
    const int m = 2 * n - 1;
    std::size_t len = 1;
    while (len < static_cast<std::size_t>(2 * m)) len <<= 1;  // >= 2*(2n-1), radix-2

    std::vector<double> padded(len, 0.0);
    for (int i = 0; i < n; ++i) padded[static_cast<std::size_t>(i)] = f[i];
    padded[0] *= 0.5;  // endpoint half-weight; squared spectrum doubles it

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, padded);
    for (auto& z : spec) z *= z;
    std::vector<double> lin;
    fft.inv(lin, spec);

    // halving f_0 halves both cross terms j = 0 and j = k, which is exactly
    // the -f_0 f_k trapezoid correction; only c_0 needs the empty-interval
    // override (the squared half sample would leave f_0^2/4 there)
    Eigen::ArrayXd c(m);
    c[0] = 0.0;
    for (int k = 1; k < m; ++k) c[k] = std::max(0.0, h * lin[static_cast<std::size_t>(k)]);
    return c;
}

}  // namespace

ConvolutionField self_convolve(const DensityField& f, Backend backend) {
    require_normalized(f, "self_convolve");
    Eigen::ArrayXd c = backend == Backend::direct ? convolve_direct(f.values, f.grid.h)
                                                  : convolve_fft(f.values, f.grid.h);
    return {f.grid, std::move(c)};
}

DensityField tail_weighted_integral(const ConvolutionField& c) {
    const int m = c.size();
    const int n = c.base.n;
    const double h = c.base.h;
    if (m != 2 * n - 1) {
        throw std::invalid_argument("wex::tail_weighted_integral: convolution must hold 2n-1 samples");
    }
    if ((c.values < 0.0).any()) {
        throw std::invalid_argument("wex::tail_weighted_integral: convolution values must be nonnegative");
    }

    Eigen::ArrayXd d(m);
    d[0] = c.values[1] / c.s(1);  // removable singularity, extrapolated from s_1
    for (int k = 1; k < m; ++k) d[k] = c.values[k] / c.s(k);

    Eigen::ArrayXd g(m);
    g[m - 1] = 0.0;
    for (int i = m - 2; i >= 0; --i) g[i] = g[i + 1] + 0.5 * h * (d[i] + d[i + 1]);
    return {c.base, g.head(n)};
}

ApplyResult apply_operator(const DensityField& f, const OperatorConfig& cfg) {
    require_normalized(f, "apply_operator");
    if (!(cfg.conv_mass_tol > 0.0) || !(cfg.mean_drift_tol > 0.0)) {
        throw std::invalid_argument("wex::apply_operator: tolerances must be positive");
    }

    const ConvolutionField c = self_convolve(f, cfg.backend);
    DensityField out = tail_weighted_integral(c);

    ApplyDiagnostics diag;
    diag.conv_mass = conv_mass(c);
    diag.conv_mass_within_tol = std::abs(diag.conv_mass - 1.0) <= cfg.conv_mass_tol;
    diag.raw_mass = trapezoid_mass(out);
    diag.mass_deficit = 1.0 - diag.raw_mass;
    diag.mean_in = moment(f, 1);

    if (cfg.renormalize_output) out = normalize(out);
    diag.mean_out = moment(out, 1);

    if (std::abs(diag.mean_out - diag.mean_in) > cfg.mean_drift_tol) {
        throw std::runtime_error(
            "wex::apply_operator: mean drifted from " + std::to_string(diag.mean_in) + " to " +
            std::to_string(diag.mean_out) +
            " (beyond mean_drift_tol); increase x_max or the resolution");
    }
    return {std::move(out), diag};
}

}  // namespace wex
