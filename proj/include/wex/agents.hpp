#ifndef WEX_AGENTS_HPP_
#define WEX_AGENTS_HPP_

#include "wex/grid.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace wex {

struct SimConfig {
    enum class Initial { equal, uniform, exponential };

    std::int64_t n_agents = 100000;
    Initial initial = Initial::equal;
    double mean = 1.0;  // equal(m) / uniform(0, 2m) / exponential(m)
    std::uint64_t seed = 1;
    std::int64_t sweeps = 1000;
};

SimConfig::Initial sim_initial_from_string(const std::string& s);
std::string to_string(SimConfig::Initial i);

/// Pool-and-split exchange: the pair (w_i, w_j) becomes
/// (eps*(w_i+w_j), (w_i+w_j) - eps*(w_i+w_j)); the second share is computed
/// by subtraction so the pair total is preserved by construction.
std::pair<double, double> exchange_step(double w_i, double w_j, double eps);

/// Population of agent wealths driven by random disjoint-pair exchanges.
///
/// Reproducibility contract: the generator is std::mt19937_64 seeded with
/// cfg.seed; pairings come from a Fisher-Yates shuffle with rejection-sampled
/// bounded draws and the split fraction from (x >> 11) * 2^-53, so identical
/// configs give bit-identical populations on any conforming platform.
///
/// Wealths are kept on a dyadic lattice (multiples of quantum()) and splits
/// are rounded to whole quanta; every pair sum and population sum is then
/// exact in double arithmetic, which makes total conservation literally
/// bit-level. The quantum is <= 2^-8 and chosen so the total fits in 2^52
/// quanta (splits differ from eps*(w_i+w_j) by at most quantum()/2).
class Population {
  public:
    explicit Population(const SimConfig& cfg);

    /// One pass of N/2 disjoint random pair exchanges (random permutation,
    /// consecutive pairing, independent eps ~ U[0,1) per pair). With odd N
    /// the leftover agent sits out. Total wealth is bit-identical before
    /// and after.
    void sweep();

    std::int64_t size() const { return static_cast<std::int64_t>(wealths_.size()); }
    std::uint64_t sweep_count() const { return sweep_count_; }
    double quantum() const { return quantum_; }
    const std::vector<double>& wealths() const { return wealths_; }

    /// Exact total (every partial sum of lattice wealths is representable).
    double total_wealth() const;

  private:
    std::vector<double> wealths_;
    double quantum_ = 0.0;
    std::mt19937_64 rng_;
    std::uint64_t sweep_count_ = 0;
};

struct EquilibriumReport {
    double ks = 0.0;           // vs exponential with rate 1/sample mean
    double sample_mean = 0.0;
    double gini = 0.0;
    std::int64_t n_agents = 0;
    std::uint64_t sweeps = 0;
};

struct SimulationResult {
    Population population;
    EquilibriumReport report;
};

SimulationResult run_simulation(const SimConfig& cfg);

struct HistogramResult {
    DensityField density;
    std::int64_t clipped_count = 0;
    double clipped_fraction = 0.0;
};

/// Bin wealths into cells centered on the grid points (count/(N h), then
/// normalized). Wealths at or beyond x_max + h/2 are clipped and reported;
/// clipped fraction above 1% is an error advising a larger x_max.
HistogramResult histogram(const Population& p, const Grid& g);

}  // namespace wex

#endif  // WEX_AGENTS_HPP_
