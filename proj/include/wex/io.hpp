#ifndef WEX_IO_HPP_
#define WEX_IO_HPP_

#include "wex/analysis.hpp"
#include "wex/fixed_point.hpp"
#include "wex/grid.hpp"
#include "wex/operator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace wex {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "wexlab 0.1.0";

/// Two-column CSV, header "x,f", 17 significant digits (lossless round-trip).
void write_density_csv(const DensityField& f, const std::filesystem::path& path);

/// Validates monotone uniform spacing and nonnegative densities, then
/// reconstructs the Grid from the x column. Malformed rows, irregular
/// spacing and negative values are distinct errors naming the row.
DensityField read_density_csv(const std::filesystem::path& path);

/// One CSV row per iteration: n,l1_prev,l1_exp,mass,mean,entropy.
void write_trace(const IterationTrace& t, const std::filesystem::path& path);
IterationTrace read_trace(const std::filesystem::path& path);

struct IterationSection {
    double eps = 1e-10;
    int max_iter = 200;
    std::string initial;  // CLI spelling: exp | uniform:a,b | custom:path

    bool operator==(const IterationSection&) const = default;
};

struct SimulationSection {
    std::int64_t agents = 100000;
    std::int64_t sweeps = 1000;
    std::string initial;  // equal:m | uniform:0,b | exp:m
    double hist_x_max = 30.0;
    int hist_n = 3001;

    bool operator==(const SimulationSection&) const = default;
};

struct ProbeSection {
    double amplitude = 0.05;
    std::string mode = "laguerre";

    bool operator==(const ProbeSection&) const = default;
};

struct FitSummary {
    double rate_mle = 0.0;
    double ks = 0.0;
    double l1 = 0.0;
    double kl = 0.0;  // may be infinity
    double gini = 0.0;

    bool operator==(const FitSummary&) const = default;
};

/// Everything needed to reproduce a run exactly: configuration, seed,
/// timestamps, termination status and the summary fit.
struct RunManifest {
    int schema_version = kManifestSchemaVersion;
    std::string artifact_version = kArtifactVersion;
    std::string command;  // iterate | simulate | probe
    double x_max = 30.0;
    int n = 3001;
    std::string backend = "fft";
    bool renormalize_output = true;
    double conv_mass_tol = 1e-6;
    double mean_drift_tol = 1e-3;
    std::uint64_t seed = 0;
    std::optional<IterationSection> iteration;
    std::optional<SimulationSection> simulation;
    std::optional<ProbeSection> probe;
    std::string started_at;
    std::string finished_at;
    std::string termination;  // converged | max_iter_reached | completed
    std::optional<FitSummary> summary;

    bool operator==(const RunManifest&) const = default;
};

/// Key-tree (JSON) serialization. Reading rejects unknown schema versions
/// (reporting both) and missing required fields (naming the field).
void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace wex

#endif  // WEX_IO_HPP_
