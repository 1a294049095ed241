#ifndef WEX_TESTS_FIELDS_HPP_
#define WEX_TESTS_FIELDS_HPP_

#include "wex/grid.hpp"

#include <cmath>

namespace wex::testing {

// triangle peaked at 1, support [0, 2]
inline DensityField triangular_field(const Grid& g) {
    return normalize(discretize(g, [](double x) {
        if (x <= 1.0) return x;
        return x <= 2.0 ? 2.0 - x : 0.0;
    }));
}

inline DensityField gaussian_field(const Grid& g, double mu, double sigma) {
    return normalize(discretize(g, [=](double x) {
        const double z = (x - mu) / sigma;
        return std::exp(-0.5 * z * z);
    }));
}

inline DensityField bimodal_field(const Grid& g) {
    return normalize(discretize(g, [](double x) {
        const double z1 = (x - 0.6) / 0.12;
        const double z2 = (x - 2.2) / 0.35;
        return 0.6 * std::exp(-0.5 * z1 * z1) / 0.12 + 0.4 * std::exp(-0.5 * z2 * z2) / 0.35;
    }));
}

// indicator of [a, b), sampled without midpoint smoothing: supports stay
// disjoint on the grid and the convolution peak keeps its full value
inline DensityField halfopen_uniform_field(const Grid& g, double a, double b) {
    return normalize(discretize(g, [=](double x) { return x >= a && x < b ? 1.0 : 0.0; }));
}

}  // namespace wex::testing

#endif  // WEX_TESTS_FIELDS_HPP_
