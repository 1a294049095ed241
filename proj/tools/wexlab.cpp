// wexlab: iterate the wealth-exchange operator, run the agent model,
// probe fixed-point stability and compare saved densities.
#include <CLI11.hpp>
#include <json.hpp>

#include "wex/agents.hpp"
#include "wex/analysis.hpp"
#include "wex/fixed_point.hpp"
#include "wex/grid.hpp"
#include "wex/io.hpp"
#include "wex/operator.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitStalled = 2;

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

wex::FitSummary summarize(const wex::FitReport& r) {
    return {r.rate_mle, r.ks, r.l1, r.kl_finite ? r.kl : std::numeric_limits<double>::infinity(),
            r.gini};
}

// initial-shape spellings: exp | uniform:a,b | custom:path
wex::DensityField build_initial(const std::string& shape, const wex::Grid& g) {
    if (shape == "exp") return wex::exponential_field(g, 1.0);
    if (shape.rfind("uniform:", 0) == 0) {
        const std::string args = shape.substr(8);
        const auto comma = args.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("initial '" + shape + "': expected uniform:a,b");
        }
        const double a = std::stod(args.substr(0, comma));
        const double b = std::stod(args.substr(comma + 1));
        return wex::uniform_field(g, a, b);
    }
    if (shape.rfind("custom:", 0) == 0) {
        const fs::path path = shape.substr(7);
        wex::DensityField f = wex::read_density_csv(path);
        if (!wex::same_grid(f.grid, g)) {
            throw std::invalid_argument("initial '" + shape + "': density grid (x_max " +
                                        std::to_string(f.grid.x_max) + ", n " +
                                        std::to_string(f.grid.n) +
                                        ") does not match --xmax/--n");
        }
        return wex::normalize(f);
    }
    throw std::invalid_argument("initial '" + shape + "': expected exp|uniform:a,b|custom:path");
}

// simulate spellings: equal:m | uniform:0,b | exp:m
wex::SimConfig parse_sim_initial(const std::string& shape, wex::SimConfig cfg) {
    const auto colon = shape.find(':');
    const std::string kind = shape.substr(0, colon);
    if (colon == std::string::npos || colon + 1 >= shape.size()) {
        throw std::invalid_argument("initial '" + shape + "': expected equal:m|uniform:0,b|exp:m");
    }
    const std::string args = shape.substr(colon + 1);
    if (kind == "equal") {
        cfg.initial = wex::SimConfig::Initial::equal;
        cfg.mean = std::stod(args);
    } else if (kind == "uniform") {
        const auto comma = args.find(',');
        if (comma == std::string::npos || std::stod(args.substr(0, comma)) != 0.0) {
            throw std::invalid_argument("initial '" + shape + "': expected uniform:0,b");
        }
        cfg.initial = wex::SimConfig::Initial::uniform;
        cfg.mean = std::stod(args.substr(comma + 1)) / 2.0;
    } else if (kind == "exp") {
        cfg.initial = wex::SimConfig::Initial::exponential;
        cfg.mean = std::stod(args);
    } else {
        throw std::invalid_argument("initial '" + shape + "': expected equal:m|uniform:0,b|exp:m");
    }
    if (!(cfg.mean > 0.0)) {
        throw std::invalid_argument("initial '" + shape + "': mean must be positive");
    }
    return cfg;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct IterateArgs {
    std::string initial = "exp";
    double x_max = 30.0;
    int n = 3001;
    std::string backend = "fft";
    double eps = 1e-10;
    int max_iter = 200;
    std::string out;
    std::string manifest_path;
};

int cmd_iterate(const IterateArgs& args_in) {
    IterateArgs args = args_in;
    if (!args.manifest_path.empty()) {
        const wex::RunManifest m = wex::read_manifest(args.manifest_path);
        if (m.command != "iterate" || !m.iteration) {
            throw std::invalid_argument("manifest " + args.manifest_path +
                                        " does not describe an iterate run");
        }
        args.x_max = m.x_max;
        args.n = m.n;
        args.backend = m.backend;
        args.eps = m.iteration->eps;
        args.max_iter = m.iteration->max_iter;
        args.initial = m.iteration->initial;
    }

    // validate everything before touching the output directory
    const wex::Grid grid = wex::make_grid(args.x_max, args.n);
    wex::OperatorConfig op;
    op.backend = wex::backend_from_string(args.backend);
    wex::IterationConfig it;
    it.eps = args.eps;
    it.max_iter = args.max_iter;
    if (!(it.eps > 0.0) || it.max_iter < 1) {
        throw std::invalid_argument("need --eps > 0 and --max-iter >= 1");
    }
    const wex::DensityField f0 = build_initial(args.initial, grid);

    wex::RunManifest manifest;
    manifest.command = "iterate";
    manifest.x_max = grid.x_max;
    manifest.n = grid.n;
    manifest.backend = wex::to_string(op.backend);
    manifest.renormalize_output = op.renormalize_output;
    manifest.conv_mass_tol = op.conv_mass_tol;
    manifest.mean_drift_tol = op.mean_drift_tol;
    manifest.iteration = wex::IterationSection{it.eps, it.max_iter, args.initial};
    manifest.started_at = now_utc();

    const wex::IterateResult res = wex::iterate(f0, op, it);

    manifest.finished_at = now_utc();
    manifest.termination = wex::to_string(res.status);
    manifest.summary = summarize(wex::fit_exponential(res.density));

    const fs::path dir = args.out;
    fs::create_directories(dir);
    wex::write_density_csv(res.density, dir / "final.csv");
    wex::write_trace(res.trace, dir / "trace.csv");
    wex::write_manifest(manifest, dir / "manifest.json");

    std::cout << "iterate: " << wex::to_string(res.status) << " after " << res.iterations
              << " iterations, successive L1 " << fmt(res.final_l1_prev) << "\n";
    return res.status == wex::Termination::converged ? kExitOk : kExitStalled;
}

struct SimulateArgs {
    std::int64_t agents = 100000;
    std::int64_t sweeps = 1000;
    std::uint64_t seed = 1;
    std::string initial = "equal:1";
    double x_max = 30.0;
    int n = 3001;
    std::string out;
    std::string manifest_path;
};

int cmd_simulate(const SimulateArgs& args_in) {
    SimulateArgs args = args_in;
    if (!args.manifest_path.empty()) {
        const wex::RunManifest m = wex::read_manifest(args.manifest_path);
        if (m.command != "simulate" || !m.simulation) {
            throw std::invalid_argument("manifest " + args.manifest_path +
                                        " does not describe a simulate run");
        }
        args.agents = m.simulation->agents;
        args.sweeps = m.simulation->sweeps;
        args.initial = m.simulation->initial;
        args.seed = m.seed;
        args.x_max = m.simulation->hist_x_max;
        args.n = m.simulation->hist_n;
    }

    const wex::Grid grid = wex::make_grid(args.x_max, args.n);
    wex::SimConfig cfg;
    cfg.n_agents = args.agents;
    cfg.sweeps = args.sweeps;
    cfg.seed = args.seed;
    cfg = parse_sim_initial(args.initial, cfg);
    if (cfg.n_agents < 2) throw std::invalid_argument("--agents must be at least 2");
    if (cfg.sweeps < 0) throw std::invalid_argument("--sweeps must be nonnegative");

    wex::RunManifest manifest;
    manifest.command = "simulate";
    manifest.x_max = grid.x_max;
    manifest.n = grid.n;
    manifest.seed = cfg.seed;
    manifest.simulation =
        wex::SimulationSection{cfg.n_agents, cfg.sweeps, args.initial, grid.x_max, grid.n};
    manifest.started_at = now_utc();

    const wex::SimulationResult sim = wex::run_simulation(cfg);
    const wex::HistogramResult hist = wex::histogram(sim.population, grid);

    manifest.finished_at = now_utc();
    manifest.termination = "completed";
    manifest.summary = summarize(wex::fit_exponential(sim.population.wealths()));

    const fs::path dir = args.out;
    fs::create_directories(dir);
    wex::write_density_csv(hist.density, dir / "histogram.csv");
    json report{{"ks", sim.report.ks},
                {"sample_mean", sim.report.sample_mean},
                {"gini", sim.report.gini},
                {"n_agents", sim.report.n_agents},
                {"sweeps", sim.report.sweeps},
                {"clipped_count", hist.clipped_count},
                {"clipped_fraction", hist.clipped_fraction}};
    std::ofstream rep(dir / "report.json");
    rep << report.dump(2) << '\n';
    if (!rep) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    wex::write_manifest(manifest, dir / "manifest.json");

    std::cout << "simulate: " << cfg.sweeps << " sweeps, KS " << fmt(sim.report.ks) << ", gini "
              << fmt(sim.report.gini) << ", mean " << fmt(sim.report.sample_mean) << "\n";
    return kExitOk;
}

void print_fit(const std::string& tag, const wex::FitReport& r) {
    std::cout << tag << ".rate_mle " << fmt(r.rate_mle) << "\n";
    std::cout << tag << ".ks " << fmt(r.ks) << "\n";
    std::cout << tag << ".l1 " << fmt(r.l1) << "\n";
    std::cout << tag << ".kl " << (r.kl_finite ? fmt(r.kl) : "inf") << "\n";
    std::cout << tag << ".gini " << fmt(r.gini) << "\n";
}

int cmd_compare(const std::string& left_path, const std::string& right_path) {
    const wex::DensityField left = wex::read_density_csv(left_path);
    const wex::DensityField right = wex::read_density_csv(right_path);
    if (!wex::same_grid(left.grid, right.grid)) {
        throw std::invalid_argument("compare: grids differ (" + left_path + ": n=" +
                                    std::to_string(left.grid.n) + ", x_max=" +
                                    std::to_string(left.grid.x_max) + "; " + right_path + ": n=" +
                                    std::to_string(right.grid.n) + ", x_max=" +
                                    std::to_string(right.grid.x_max) + ")");
    }
    print_fit("left", wex::fit_exponential(left));
    print_fit("right", wex::fit_exponential(right));
    const double kl = wex::kl_divergence(left, right);
    std::cout << "pair.l1 " << fmt(wex::l1_distance(left, right)) << "\n";
    std::cout << "pair.kl " << (std::isfinite(kl) ? fmt(kl) : "inf") << "\n";
    return kExitOk;
}

struct ProbeArgs {
    double amplitude = 0.05;
    std::string mode = "laguerre";
    double x_max = 30.0;
    int n = 3001;
    std::string backend = "fft";
    std::string out;
    std::string manifest_path;
};

int cmd_probe(const ProbeArgs& args_in) {
    ProbeArgs args = args_in;
    if (!args.manifest_path.empty()) {
        const wex::RunManifest m = wex::read_manifest(args.manifest_path);
        if (m.command != "probe" || !m.probe) {
            throw std::invalid_argument("manifest " + args.manifest_path +
                                        " does not describe a probe run");
        }
        args.x_max = m.x_max;
        args.n = m.n;
        args.backend = m.backend;
        args.amplitude = m.probe->amplitude;
        args.mode = m.probe->mode;
    }

    const wex::Grid grid = wex::make_grid(args.x_max, args.n);
    wex::OperatorConfig op;
    op.backend = wex::backend_from_string(args.backend);
    const wex::PerturbationMode mode = wex::perturbation_mode_from_string(args.mode);

    wex::RunManifest manifest;
    manifest.command = "probe";
    manifest.x_max = grid.x_max;
    manifest.n = grid.n;
    manifest.backend = wex::to_string(op.backend);
    manifest.probe = wex::ProbeSection{args.amplitude, args.mode};
    manifest.started_at = now_utc();

    const wex::ContractionReport rep = wex::probe_stability(grid, args.amplitude, mode, op);

    manifest.finished_at = now_utc();
    manifest.termination = "completed";

    json j{{"amplitude", rep.amplitude},
           {"mode", wex::to_string(rep.mode)},
           {"geometric_mean", rep.geometric_mean},
           {"distances", rep.distances}};
    json ratios = json::array();
    for (double r : rep.ratios) {
        if (std::isfinite(r)) {
            ratios.push_back(r);
        } else {
            ratios.push_back(nullptr);
        }
    }
    j["ratios"] = ratios;

    const fs::path dir = args.out;
    fs::create_directories(dir);
    std::ofstream out(dir / "probe.json");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (dir / "probe.json").string());
    wex::write_manifest(manifest, dir / "manifest.json");

    std::cout << "probe: mode " << wex::to_string(rep.mode) << ", amplitude "
              << fmt(rep.amplitude) << ", geometric mean contraction "
              << fmt(rep.geometric_mean) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wexlab: numerical laboratory for the pooled-wealth exchange operator"};
    app.require_subcommand(1);

    IterateArgs it;
    CLI::App* sub_it = app.add_subcommand("iterate", "iterate the operator to its fixed point");
    sub_it->add_option("--initial", it.initial, "exp | uniform:a,b | custom:path");
    sub_it->add_option("--xmax", it.x_max, "grid extent");
    sub_it->add_option("--n", it.n, "grid points");
    sub_it->add_option("--backend", it.backend, "direct | fft");
    sub_it->add_option("--eps", it.eps, "successive-L1 stopping threshold");
    sub_it->add_option("--max-iter", it.max_iter, "iteration cap");
    sub_it->add_option("--out", it.out, "output directory")->required();
    sub_it->add_option("--manifest", it.manifest_path, "replay configuration from a manifest");

    SimulateArgs sim;
    CLI::App* sub_sim = app.add_subcommand("simulate", "run the agent exchange model");
    sub_sim->add_option("--agents", sim.agents, "population size");
    sub_sim->add_option("--sweeps", sim.sweeps, "number of sweeps");
    sub_sim->add_option("--seed", sim.seed, "rng seed");
    sub_sim->add_option("--initial", sim.initial, "equal:m | uniform:0,b | exp:m");
    sub_sim->add_option("--xmax", sim.x_max, "histogram grid extent");
    sub_sim->add_option("--n", sim.n, "histogram grid points");
    sub_sim->add_option("--out", sim.out, "output directory")->required();
    sub_sim->add_option("--manifest", sim.manifest_path, "replay configuration from a manifest");

    std::string cmp_left, cmp_right;
    CLI::App* sub_cmp = app.add_subcommand("compare", "compare two density CSV files");
    sub_cmp->add_option("left", cmp_left, "first density CSV")->required();
    sub_cmp->add_option("right", cmp_right, "second density CSV")->required();

    ProbeArgs pr;
    CLI::App* sub_pr = app.add_subcommand("probe", "perturb the fixed point and measure contraction");
    sub_pr->add_option("--amplitude", pr.amplitude, "perturbation amplitude");
    sub_pr->add_option("--mode", pr.mode, "laguerre | sine | dipole");
    sub_pr->add_option("--xmax", pr.x_max, "grid extent");
    sub_pr->add_option("--n", pr.n, "grid points");
    sub_pr->add_option("--backend", pr.backend, "direct | fft");
    sub_pr->add_option("--out", pr.out, "output directory")->required();
    sub_pr->add_option("--manifest", pr.manifest_path, "replay configuration from a manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sub_it->parsed()) return cmd_iterate(it);
        if (sub_sim->parsed()) return cmd_simulate(sim);
        if (sub_cmp->parsed()) return cmd_compare(cmp_left, cmp_right);
        if (sub_pr->parsed()) return cmd_probe(pr);
    } catch (const std::exception& e) {
        std::cerr << "wexlab: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
