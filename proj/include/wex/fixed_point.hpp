#ifndef WEX_FIXED_POINT_HPP_
#define WEX_FIXED_POINT_HPP_

#include "wex/operator.hpp"

#include <vector>

namespace wex {

struct IterationConfig {
    int max_iter = 200;
    double eps = 1e-10;       // successive-iterate L1 threshold
    bool record_trace = true;
};

/// Per-iteration diagnostics. l1_exp and kl_exp are measured against the
/// exponential with the iterate's own mean; mass is the pre-renormalization
/// mass of the step that produced the iterate.
struct TraceRecord {
    int n = 0;
    double l1_prev = 0.0;
    double sup_prev = 0.0;
    double l1_exp = 0.0;
    double kl_exp = 0.0;
    double mass = 0.0;
    double mean = 0.0;
    double entropy = 0.0;
};

struct IterationTrace {
    std::vector<TraceRecord> records;
};

enum class Termination { converged, max_iter_reached };

std::string to_string(Termination t);

struct IterateResult {
    DensityField density;
    IterationTrace trace;
    Termination status = Termination::max_iter_reached;
    int iterations = 0;
    double final_l1_prev = 0.0;
};

/// Picard iteration f_{n+1} = T[f_n] until the successive L1 distance drops
/// below eps or max_iter is reached. Non-convergence is a status, not an
/// error; operator errors (mean drift) propagate.
IterateResult iterate(const DensityField& f0, const OperatorConfig& op_cfg,
                      const IterationConfig& it_cfg);

/// Boltzmann-Gibbs entropy -trapezoid of f ln f, with 0*ln 0 = 0.
double entropy(const DensityField& f);

/// Perturbation shapes for the stability probe. All are damped by e^{-x}
/// so the projected start stays nonnegative at sane amplitudes:
///   laguerre: (1 - 2x + x^2/2) e^{-x}   (Laguerre-2 weighted)
///   sine:     sin(pi x / 2) e^{-x}
///   dipole:   difference of two Gaussian bumps at x = 1.5 and 2.5
enum class PerturbationMode { laguerre, sine, dipole };

PerturbationMode perturbation_mode_from_string(const std::string& s);
std::string to_string(PerturbationMode m);

struct ContractionReport {
    double amplitude = 0.0;
    PerturbationMode mode = PerturbationMode::laguerre;
    std::vector<double> distances;  // L1(f_n, f*) for n = 0..steps
    std::vector<double> ratios;     // r_n = d_n / d_{n-1}, NaN when d_{n-1} = 0
    double geometric_mean = 0.0;    // over the finite ratios
};

/// Start from f* + delta where delta is the chosen mode scaled by
/// `amplitude` and projected to zero trapezoidal mass and mean (along the
/// damped directions {f*, x f*}), then apply the operator `steps` times and
/// report the contraction of the L1 distance to f*. Throws when the
/// perturbed start goes negative (amplitude too large).
ContractionReport probe_stability(const Grid& g, double amplitude,
                                  PerturbationMode mode,
                                  const OperatorConfig& op_cfg, int steps = 10);

}  // namespace wex

#endif  // WEX_FIXED_POINT_HPP_
