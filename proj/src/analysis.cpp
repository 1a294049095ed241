#include "wex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wex {

namespace {

void require_same_grid(const DensityField& f, const DensityField& g, const char* where) {
    if (!same_grid(f.grid, g.grid)) {
        throw std::invalid_argument(std::string("wex::") + where +
                                    ": fields live on different grids (n " + std::to_string(f.grid.n) +
                                    " vs " + std::to_string(g.grid.n) + ", x_max " +
                                    std::to_string(f.grid.x_max) + " vs " +
                                    std::to_string(g.grid.x_max) + ")");
    }
}

}  // namespace

double l1_distance(const DensityField& f, const DensityField& g) {
    require_same_grid(f, g, "l1_distance");
    return trapezoid((f.values - g.values).abs(), f.grid.h);
}

double sup_distance(const DensityField& f, const DensityField& g) {
    require_same_grid(f, g, "sup_distance");
    return (f.values - g.values).abs().maxCoeff();
}

double kl_divergence(const DensityField& f, const DensityField& g) {
    require_same_grid(f, g, "kl_divergence");
    Eigen::ArrayXd terms = Eigen::ArrayXd::Zero(f.grid.n);
    for (int i = 0; i < f.grid.n; ++i) {
        if (f.values[i] > 0.0) {
            if (g.values[i] <= 0.0) return std::numeric_limits<double>::infinity();
            terms[i] = f.values[i] * std::log(f.values[i] / g.values[i]);
        }
    }
    return trapezoid(terms, f.grid.h);
}

double ks_statistic(std::span<const double> samples, double rate) {
    if (samples.empty()) throw std::invalid_argument("wex::ks_statistic: empty sample");
    if (!(rate > 0.0)) {
        throw std::invalid_argument("wex::ks_statistic: rate must be positive, got " +
                                    std::to_string(rate));
    }
    std::vector<double> w(samples.begin(), samples.end());
    std::sort(w.begin(), w.end());
    if (w.front() < 0.0) {
        throw std::invalid_argument("wex::ks_statistic: samples must be nonnegative");
    }
    const double n = static_cast<double>(w.size());
    double d = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double cdf = 1.0 - std::exp(-rate * w[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(hi - cdf, cdf - lo));
    }
    return d;
}

double gini(std::span<const double> wealths) {
    if (wealths.empty()) throw std::invalid_argument("wex::gini: empty sample");
    std::vector<double> w(wealths.begin(), wealths.end());
    std::sort(w.begin(), w.end());
    if (w.front() < 0.0) {
        throw std::invalid_argument("wex::gini: wealths must be nonnegative");
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("wex::gini: total wealth must be positive");
    const double n = static_cast<double>(w.size());
    double ranked = 0.0;  // sum of (i+1) * w_(i)
    for (std::size_t i = 0; i < w.size(); ++i) ranked += static_cast<double>(i + 1) * w[i];
    return 2.0 * ranked / (n * total) - (n + 1.0) / n;
}

Eigen::ArrayXd cumulative_trapezoid(const DensityField& f) {
    const int n = f.grid.n;
    Eigen::ArrayXd cdf(n);
    cdf[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        cdf[i] = cdf[i - 1] + 0.5 * f.grid.h * (f.values[i - 1] + f.values[i]);
    }
    return cdf;
}

FitReport fit_exponential(const DensityField& f) {
    const double mean = moment(f, 1);
    if (!(mean > 0.0)) {
        throw std::invalid_argument("wex::fit_exponential: field mean must be positive, got " +
                                    std::to_string(mean));
    }
    FitReport r;
    r.rate_mle = 1.0 / mean;

    const DensityField ref = exponential_field(f.grid, mean);
    r.l1 = l1_distance(f, ref);
    r.kl = kl_divergence(f, ref);
    r.kl_finite = std::isfinite(r.kl);

    const Eigen::ArrayXd cdf = cumulative_trapezoid(f);
    const Eigen::ArrayXd x = grid_points(f.grid);
    r.ks = (cdf - (1.0 - (-r.rate_mle * x).exp())).abs().maxCoeff();
    // Gini of a density: integral of F(1-F) dx / mean
    r.gini = trapezoid(cdf * (1.0 - cdf), f.grid.h) / mean;
    return r;
}

FitReport fit_exponential(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("wex::fit_exponential: empty sample");
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    if (!(mean > 0.0)) {
        throw std::invalid_argument("wex::fit_exponential: sample mean must be positive, got " +
                                    std::to_string(mean));
    }
    FitReport r;
    r.rate_mle = 1.0 / mean;
    r.ks = ks_statistic(samples, r.rate_mle);
    r.gini = gini(samples);

    // density-based fields on a derived grid covering every sample
    const double wmax = *std::max_element(samples.begin(), samples.end());
    const Grid g = make_grid(std::max(1.02 * wmax, 8.0 * mean), 601);
    Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(g.n);
    for (double w : samples) {
        const auto idx = static_cast<int>(std::floor(w / g.h + 0.5));
        if (idx >= 0 && idx < g.n) counts[idx] += 1.0;
    }
    const DensityField hist = normalize({g, counts / (static_cast<double>(samples.size()) * g.h)});
    const DensityField ref = exponential_field(g, mean);
    r.l1 = l1_distance(hist, ref);
    r.kl = kl_divergence(hist, ref);
    r.kl_finite = std::isfinite(r.kl);
    return r;
}

}  // namespace wex
