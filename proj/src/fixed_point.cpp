#include "wex/fixed_point.hpp"

#include "wex/analysis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>

namespace wex {

std::string to_string(Termination t) {
    return t == Termination::converged ? "converged" : "max_iter_reached";
}

PerturbationMode perturbation_mode_from_string(const std::string& s) {
    if (s == "laguerre") return PerturbationMode::laguerre;
    if (s == "sine") return PerturbationMode::sine;
    if (s == "dipole") return PerturbationMode::dipole;
    throw std::invalid_argument("wex::perturbation_mode_from_string: unknown mode '" + s +
                                "' (expected laguerre|sine|dipole)");
}

std::string to_string(PerturbationMode m) {
    switch (m) {
        case PerturbationMode::laguerre: return "laguerre";
        case PerturbationMode::sine: return "sine";
        case PerturbationMode::dipole: return "dipole";
    }
    return "laguerre";
}

double entropy(const DensityField& f) {
    Eigen::ArrayXd terms = Eigen::ArrayXd::Zero(f.grid.n);
    for (int i = 0; i < f.grid.n; ++i) {
        if (f.values[i] > 0.0) terms[i] = f.values[i] * std::log(f.values[i]);
    }
    return -trapezoid(terms, f.grid.h);
}

IterateResult iterate(const DensityField& f0, const OperatorConfig& op_cfg,
                      const IterationConfig& it_cfg) {
    if (!(it_cfg.eps > 0.0) || it_cfg.max_iter < 1) {
        throw std::invalid_argument("wex::iterate: need eps > 0 and max_iter >= 1");
    }
    const double mean0 = moment(f0, 1);
    if (!(mean0 > 0.0) || !std::isfinite(mean0)) {
        throw std::invalid_argument("wex::iterate: f0 must have a positive finite mean, got " +
                                    std::to_string(mean0));
    }

    IterateResult res;
    DensityField f = f0;
    for (int it = 1; it <= it_cfg.max_iter; ++it) {
        ApplyResult step = apply_operator(f, op_cfg);
        const double l1_prev = l1_distance(step.density, f);
        res.iterations = it;
        res.final_l1_prev = l1_prev;
        if (it_cfg.record_trace) {
            TraceRecord rec;
            rec.n = it;
            rec.l1_prev = l1_prev;
            rec.sup_prev = sup_distance(step.density, f);
            rec.mass = step.diagnostics.raw_mass;
            rec.mean = step.diagnostics.mean_out;
            const DensityField ref = exponential_field(f.grid, rec.mean);
            rec.l1_exp = l1_distance(step.density, ref);
            rec.kl_exp = kl_divergence(step.density, ref);
            rec.entropy = entropy(step.density);
            res.trace.records.push_back(rec);
        }
        f = std::move(step.density);
        if (l1_prev < it_cfg.eps) {
            res.status = Termination::converged;
            res.density = std::move(f);
            return res;
        }
    }
    res.status = Termination::max_iter_reached;
    res.density = std::move(f);
    return res;
}

namespace {

Eigen::ArrayXd raw_perturbation(const Eigen::ArrayXd& x, PerturbationMode mode) {
    switch (mode) {
        case PerturbationMode::laguerre:
            return (1.0 - 2.0 * x + 0.5 * x * x) * (-x).exp();
        case PerturbationMode::sine:
            return (std::numbers::pi / 2.0 * x).sin() * (-x).exp();
        case PerturbationMode::dipole: {
            const double w = 0.3;
            const double norm = w * std::sqrt(2.0 * std::numbers::pi);
            return ((-0.5 * ((x - 1.5) / w).square()).exp() -
                    (-0.5 * ((x - 2.5) / w).square()).exp()) /
                   norm;
        }
    }
    return Eigen::ArrayXd::Zero(x.size());
}

}  // namespace

ContractionReport probe_stability(const Grid& g, double amplitude, PerturbationMode mode,
                                  const OperatorConfig& op_cfg, int steps) {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw std::invalid_argument("wex::probe_stability: amplitude must be finite and >= 0");
    }
    const DensityField fstar = exponential_field(g, 1.0);
    const Eigen::ArrayXd x = grid_points(g);
    const double h = g.h;

    Eigen::ArrayXd delta = amplitude * raw_perturbation(x, mode);

    // project the {1, x} trapezoidal moments out along the damped directions
    // {f*, x f*} so mass and mean vanish without touching nonnegativity
    const Eigen::ArrayXd b0 = fstar.values;
    const Eigen::ArrayXd b1 = x * fstar.values;
    Eigen::Matrix2d gram;
    gram << trapezoid(b0, h), trapezoid(b1, h), trapezoid(x * b0, h), trapezoid(x * b1, h);
    Eigen::Vector2d rhs(trapezoid(delta, h), trapezoid(x * delta, h));
    const Eigen::Vector2d ab = gram.fullPivLu().solve(rhs);
    delta -= ab[0] * b0 + ab[1] * b1;

    Eigen::ArrayXd start = fstar.values + delta;
    if ((start < 0.0).any()) {
        Eigen::Index where;
        start.minCoeff(&where);
        throw std::invalid_argument(
            "wex::probe_stability: perturbed field is negative at x = " +
            std::to_string(g.point(static_cast<int>(where))) + " (min " +
            std::to_string(start.minCoeff()) + "); reduce the amplitude");
    }

    ContractionReport report;
    report.amplitude = amplitude;
    report.mode = mode;

    DensityField f = normalize({g, std::move(start)});
    report.distances.push_back(l1_distance(f, fstar));
    for (int s = 0; s < steps; ++s) {
        f = apply_operator(f, op_cfg).density;
        report.distances.push_back(l1_distance(f, fstar));
    }
    double log_sum = 0.0;
    int finite = 0;
    for (std::size_t i = 1; i < report.distances.size(); ++i) {
        const double prev = report.distances[i - 1];
        const double r = prev > 0.0 ? report.distances[i] / prev
                                    : std::numeric_limits<double>::quiet_NaN();
        report.ratios.push_back(r);
        if (std::isfinite(r) && r > 0.0) {
            log_sum += std::log(r);
            ++finite;
        }
    }
    report.geometric_mean =
        finite > 0 ? std::exp(log_sum / finite) : std::numeric_limits<double>::quiet_NaN();
    return report;
}

}  // namespace wex
