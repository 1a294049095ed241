#include "wex/agents.hpp"

#include "wex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wex {

SimConfig::Initial sim_initial_from_string(const std::string& s) {
    if (s == "equal") return SimConfig::Initial::equal;
    if (s == "uniform") return SimConfig::Initial::uniform;
    if (s == "exp" || s == "exponential") return SimConfig::Initial::exponential;
    throw std::invalid_argument("wex::sim_initial_from_string: unknown initial '" + s +
                                "' (expected equal|uniform|exp)");
}

std::string to_string(SimConfig::Initial i) {
    switch (i) {
        case SimConfig::Initial::equal: return "equal";
        case SimConfig::Initial::uniform: return "uniform";
        case SimConfig::Initial::exponential: return "exp";
    }
    return "equal";
}

std::pair<double, double> exchange_step(double w_i, double w_j, double eps) {
    if (!(eps >= 0.0) || !(eps <= 1.0)) {
        throw std::invalid_argument("wex::exchange_step: eps must lie in [0,1], got " +
                                    std::to_string(eps));
    }
    if (!(w_i >= 0.0) || !(w_j >= 0.0)) {
        throw std::invalid_argument("wex::exchange_step: wealths must be nonnegative");
    }
    const double pooled = w_i + w_j;
    const double first = eps * pooled;
    return {first, pooled - first};
}

namespace {

// fixed uniform mapping, part of the reproducibility contract
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// unbiased bounded draw by rejection (portable, unlike std distributions)
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t m) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % m;
}

void validate(const SimConfig& cfg) {
    if (cfg.n_agents < 2) {
        throw std::invalid_argument("wex::Population: need at least 2 agents, got " +
                                    std::to_string(cfg.n_agents));
    }
    if (cfg.n_agents > (std::int64_t{1} << 31)) {
        throw std::invalid_argument("wex::Population: n_agents too large for the index type");
    }
    if (!(cfg.mean > 0.0) || !std::isfinite(cfg.mean)) {
        throw std::invalid_argument("wex::Population: mean must be positive and finite");
    }
    if (static_cast<double>(cfg.n_agents) * cfg.mean > std::ldexp(1.0, 43)) {
        // beyond this the wealth lattice cannot keep sums exact; the model is
        // scale-free, so rescaling the wealth unit loses nothing
        throw std::invalid_argument(
            "wex::Population: total wealth too large for exact accounting; rescale the unit");
    }
    if (cfg.sweeps < 0) {
        throw std::invalid_argument("wex::Population: sweeps must be nonnegative");
    }
}

double pick_quantum(double total_target) {
    // total/quantum must stay within 2^52 so all lattice sums are exact
    int exponent = 52 - static_cast<int>(std::ceil(std::log2(std::max(total_target, 1.0))));
    exponent = std::clamp(exponent, 8, 44);
    return std::ldexp(1.0, -exponent);
}

}  // namespace

Population::Population(const SimConfig& cfg) : rng_(cfg.seed) {
    validate(cfg);
    const auto n = static_cast<std::size_t>(cfg.n_agents);
    quantum_ = pick_quantum(static_cast<double>(cfg.n_agents) * cfg.mean * 2.0);
    wealths_.resize(n);

    auto quantize = [&](double w) {
        return static_cast<double>(std::llround(w / quantum_)) * quantum_;
    };
    switch (cfg.initial) {
        case SimConfig::Initial::equal: {
            const double w = quantize(cfg.mean);
            std::fill(wealths_.begin(), wealths_.end(), w);
            break;
        }
        case SimConfig::Initial::uniform:
            for (auto& w : wealths_) w = quantize(2.0 * cfg.mean * uniform01(rng_));
            break;
        case SimConfig::Initial::exponential:
            for (auto& w : wealths_) w = quantize(-cfg.mean * std::log1p(-uniform01(rng_)));
            break;
    }
}

void Population::sweep() {
    const std::size_t n = wealths_.size();
    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(bounded(rng_, i + 1));
        std::swap(perm[i], perm[j]);
    }

    for (std::size_t k = 0; k + 1 < n; k += 2) {
        double& wi = wealths_[perm[k]];
        double& wj = wealths_[perm[k + 1]];
        const double eps = uniform01(rng_);
        // integer quanta: the pooled count and both shares are exact
        const double pooled_units = wi / quantum_ + wj / quantum_;
        auto share = static_cast<double>(std::llround(eps * pooled_units));
        share = std::clamp(share, 0.0, pooled_units);
        wi = share * quantum_;
        wj = (pooled_units - share) * quantum_;
    }
    ++sweep_count_;
}

double Population::total_wealth() const {
    double total = 0.0;
    for (double w : wealths_) total += w;
    return total;
}

SimulationResult run_simulation(const SimConfig& cfg) {
    Population pop(cfg);
    for (std::int64_t s = 0; s < cfg.sweeps; ++s) pop.sweep();

    EquilibriumReport rep;
    rep.n_agents = pop.size();
    rep.sweeps = pop.sweep_count();
    rep.sample_mean = pop.total_wealth() / static_cast<double>(pop.size());
    rep.ks = ks_statistic(pop.wealths(), 1.0 / rep.sample_mean);
    rep.gini = gini(pop.wealths());
    return {std::move(pop), rep};
}

HistogramResult histogram(const Population& p, const Grid& g) {
    Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(g.n);
    std::int64_t clipped = 0;
    for (double w : p.wealths()) {
        const auto idx = static_cast<std::int64_t>(std::floor(w / g.h + 0.5));
        if (idx >= g.n) {
            ++clipped;
        } else {
            counts[static_cast<int>(idx)] += 1.0;
        }
    }
    HistogramResult res;
    res.clipped_count = clipped;
    res.clipped_fraction = static_cast<double>(clipped) / static_cast<double>(p.size());
    if (res.clipped_fraction > 0.01) {
        throw std::runtime_error("wex::histogram: " + std::to_string(100.0 * res.clipped_fraction) +
                                 "% of the population lies beyond the grid; increase x_max");
    }
    const double n_agents = static_cast<double>(p.size());
    res.density = normalize({g, counts / (n_agents * g.h)});
    return res;
}

}  // namespace wex
