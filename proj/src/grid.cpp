#include "wex/grid.hpp"

#include <limits>
#include <sstream>

namespace wex {

Grid make_grid(double x_max, int n) {
    if (!std::isfinite(x_max) || x_max <= 0.0) {
        throw std::invalid_argument("wex::make_grid: x_max must be finite and positive, got " +
                                    std::to_string(x_max));
    }
    if (n < kMinGridPoints) {
        throw std::invalid_argument("wex::make_grid: n must be at least " +
                                    std::to_string(kMinGridPoints) + ", got " + std::to_string(n));
    }
    Grid g;
    g.x_max = x_max;
    g.n = n;
    g.h = x_max / (n - 1);
    return g;
}

bool same_grid(const Grid& a, const Grid& b) {
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() * std::max(a.x_max, b.x_max);
    return a.n == b.n && std::abs(a.x_max - b.x_max) <= tol;
}

Eigen::ArrayXd grid_points(const Grid& g) {
    Eigen::ArrayXd x(g.n);
    for (int i = 0; i < g.n; ++i) x[i] = i * g.h;
    return x;
}

double trapezoid_mass(const DensityField& f) { return trapezoid(f.values, f.grid.h); }

bool is_normalized(const DensityField& f, double mass_tol) {
    return std::abs(trapezoid_mass(f) - 1.0) <= mass_tol;
}

DensityField discretize(const Grid& g, const std::function<double(double)>& f) {
    Eigen::ArrayXd v(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double y = f(g.point(i));
        if (!(y >= 0.0)) {  // catches negatives and NaN
            std::ostringstream os;
            os << "wex::discretize: f(x_" << i << " = " << g.point(i) << ") = " << y
               << " is negative or not finite";
            throw std::invalid_argument(os.str());
        }
        v[i] = y;
    }
    return {g, std::move(v)};
}

DensityField normalize(const DensityField& f) {
    const double mass = trapezoid_mass(f);
    if (!std::isfinite(mass) || mass <= 0.0) {
        throw std::invalid_argument("wex::normalize: trapezoid mass must be positive and finite, got " +
                                    std::to_string(mass));
    }
    return {f.grid, f.values / mass};
}

double moment(const DensityField& f, int k) {
    if (k < 0 || k > 2) {
        throw std::invalid_argument("wex::moment: k must be 0, 1 or 2, got " + std::to_string(k));
    }
    if (k == 0) return trapezoid_mass(f);
    const Eigen::ArrayXd x = grid_points(f.grid);
    if (k == 1) return trapezoid(f.values * x, f.grid.h);
    return trapezoid(f.values * x * x, f.grid.h);
}

DensityField exponential_field(const Grid& g, double mean) {
    if (!(mean > 0.0)) {
        throw std::invalid_argument("wex::exponential_field: mean must be positive, got " +
                                    std::to_string(mean));
    }
    return normalize(discretize(g, [mean](double x) { return std::exp(-x / mean) / mean; }));
}

DensityField uniform_field(const Grid& g, double a, double b) {
    if (!(a >= 0.0) || !(b > a)) {
        throw std::invalid_argument("wex::uniform_field: need 0 <= a < b");
    }
    const double height = 1.0 / (b - a);
    const double half = g.h / 2.0;
    auto u = [=](double x) {
        if (std::abs(x - a) < half) return a > 0.0 ? height / 2.0 : height;
        if (std::abs(x - b) < half) return height / 2.0;
        return (x > a && x < b) ? height : 0.0;
    };
    return normalize(discretize(g, u));
}

}  // namespace wex
