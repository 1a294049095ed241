#ifndef WEX_GRID_HPP_
#define WEX_GRID_HPP_

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace wex {

/// Mass tolerance for fields that claim to be normalized.
inline constexpr double kDefaultMassTol = 1e-8;
inline constexpr int kMinGridPoints = 16;

/// Uniform discretization of the truncated wealth half-line [0, x_max]:
/// points x_i = i*h, i = 0..n-1, with h = x_max/(n-1).
struct Grid {
    double x_max = 0.0;
    int n = 0;
    double h = 0.0;

    double point(int i) const { return i * h; }
};

Grid make_grid(double x_max, int n);

/// Grids are interchangeable when they have the same point count and the
/// same extent up to a few ulps (CSV round-trips may move x_max by one ulp).
bool same_grid(const Grid& a, const Grid& b);

/// x_i for all i, as an array expression source.
Eigen::ArrayXd grid_points(const Grid& g);

/// Nonnegative density sampled pointwise on a Grid. `values[i] = f(x_i)`.
struct DensityField {
    Grid grid;
    Eigen::ArrayXd values;
};

/// Composite trapezoid sum h*(v_0/2 + v_1 + ... + v_{m-2} + v_{m-1}/2).
/// Binds plain arrays without copying; expressions evaluate into the Ref.
inline double trapezoid(const Eigen::Ref<const Eigen::ArrayXd>& v, double h) {
    return h * (v.sum() - 0.5 * (v[0] + v[v.size() - 1]));
}

double trapezoid_mass(const DensityField& f);

bool is_normalized(const DensityField& f, double mass_tol = kDefaultMassTol);

/// Sample a pointwise function on the grid. Not auto-normalized.
/// Throws if any sample is negative, naming the offending index.
DensityField discretize(const Grid& g, const std::function<double(double)>& f);

/// Scale to unit trapezoid mass. Shape-preserving (one common divisor).
DensityField normalize(const DensityField& f);

/// Trapezoid estimate of the k-th raw moment, k in {0, 1, 2}.
double moment(const DensityField& f, int k);

/// Normalized truncated exponential e^{-x/mean}/mean on g.
DensityField exponential_field(const Grid& g, double mean);

/// Normalized uniform density on [a, b]. Jump points that land on the grid
/// are sampled at the midpoint of the two one-sided limits, which makes the
/// trapezoid mass and mean of grid-aligned uniforms exact.
DensityField uniform_field(const Grid& g, double a, double b);

}  // namespace wex

#endif  // WEX_GRID_HPP_
