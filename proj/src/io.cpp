#include "wex/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace wex {

namespace {

// 17 significant digits round-trip any double losslessly
std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_for_read(const std::filesystem::path& path, const char* where) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(std::string("wex::") + where + ": cannot open " + path.string());
    }
    return in;
}

std::ofstream open_for_write(const std::filesystem::path& path, const char* where) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(std::string("wex::") + where + ": cannot write " + path.string());
    }
    return out;
}

std::vector<double> parse_row(const std::string& line, std::size_t ncols, std::size_t lineno,
                              const char* where) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        double v = 0.0;
        // from_chars is locale-independent, unlike stod
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size()) {
            throw std::runtime_error(std::string("wex::") + where + ": malformed value '" + cell +
                                     "' on line " + std::to_string(lineno));
        }
        row.push_back(v);
    }
    if (row.size() != ncols) {
        throw std::runtime_error(std::string("wex::") + where + ": expected " +
                                 std::to_string(ncols) + " columns on line " +
                                 std::to_string(lineno) + ", got " + std::to_string(row.size()));
    }
    return row;
}

}  // namespace

void write_density_csv(const DensityField& f, const std::filesystem::path& path) {
    std::ofstream out = open_for_write(path, "write_density_csv");
    out << "x,f\n";
    for (int i = 0; i < f.grid.n; ++i) {
        out << fmt17(f.grid.point(i)) << ',' << fmt17(f.values[i]) << '\n';
    }
    if (!out) {
        throw std::runtime_error("wex::write_density_csv: write failed for " + path.string());
    }
}

DensityField read_density_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path, "read_density_csv");
    std::string line;
    if (!std::getline(in, line) || line != "x,f") {
        throw std::runtime_error("wex::read_density_csv: missing 'x,f' header in " + path.string());
    }
    std::vector<double> xs, fs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<double> row = parse_row(line, 2, lineno, "read_density_csv");
        if (row[1] < 0.0) {
            throw std::runtime_error("wex::read_density_csv: negative density " + fmt17(row[1]) +
                                     " on line " + std::to_string(lineno));
        }
        xs.push_back(row[0]);
        fs.push_back(row[1]);
    }
    const auto n = static_cast<int>(xs.size());
    if (n < kMinGridPoints) {
        throw std::runtime_error("wex::read_density_csv: only " + std::to_string(n) +
                                 " rows, need at least " + std::to_string(kMinGridPoints));
    }
    if (xs.front() != 0.0) {
        throw std::runtime_error("wex::read_density_csv: grid must start at x = 0, got " +
                                 fmt17(xs.front()));
    }
    const double h = xs.back() / (n - 1);
    const double tol = 1e-9 * std::max(1.0, xs.back());
    for (int i = 1; i < n; ++i) {
        if (!(xs[i] > xs[i - 1]) || std::abs(xs[i] - i * h) > tol) {
            throw std::runtime_error(
                "wex::read_density_csv: x column is not uniformly spaced at line " +
                std::to_string(i + 2) + " (x = " + fmt17(xs[i]) + ")");
        }
    }
    DensityField f;
    f.grid = make_grid(xs.back(), n);
    f.values = Eigen::Map<const Eigen::ArrayXd>(fs.data(), n);
    return f;
}

void write_trace(const IterationTrace& t, const std::filesystem::path& path) {
    std::ofstream out = open_for_write(path, "write_trace");
    out << "n,l1_prev,l1_exp,mass,mean,entropy\n";
    for (const TraceRecord& r : t.records) {
        out << r.n << ',' << fmt17(r.l1_prev) << ',' << fmt17(r.l1_exp) << ',' << fmt17(r.mass)
            << ',' << fmt17(r.mean) << ',' << fmt17(r.entropy) << '\n';
    }
    if (!out) throw std::runtime_error("wex::write_trace: write failed for " + path.string());
}

IterationTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path, "read_trace");
    std::string line;
    if (!std::getline(in, line) || line != "n,l1_prev,l1_exp,mass,mean,entropy") {
        throw std::runtime_error("wex::read_trace: bad header in " + path.string());
    }
    IterationTrace t;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<double> row = parse_row(line, 6, lineno, "read_trace");
        TraceRecord r;
        r.n = static_cast<int>(row[0]);
        r.l1_prev = row[1];
        r.l1_exp = row[2];
        r.mass = row[3];
        r.mean = row[4];
        r.entropy = row[5];
        t.records.push_back(r);
    }
    return t;
}

namespace {

using nlohmann::json;

json to_json(const FitSummary& s) {
    json j{{"rate_mle", s.rate_mle}, {"ks", s.ks}, {"l1", s.l1}, {"gini", s.gini}};
    if (std::isfinite(s.kl)) {
        j["kl"] = s.kl;
    } else {
        j["kl"] = nullptr;  // JSON has no infinity
    }
    return j;
}

FitSummary fit_from_json(const json& j) {
    FitSummary s;
    s.rate_mle = j.at("rate_mle").get<double>();
    s.ks = j.at("ks").get<double>();
    s.l1 = j.at("l1").get<double>();
    s.gini = j.at("gini").get<double>();
    s.kl = j.at("kl").is_null() ? std::numeric_limits<double>::infinity()
                                : j.at("kl").get<double>();
    return s;
}

}  // namespace

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    json j;
    j["schema_version"] = m.schema_version;
    j["artifact_version"] = m.artifact_version;
    j["command"] = m.command;
    j["grid"] = {{"x_max", m.x_max}, {"n", m.n}};
    j["operator"] = {{"backend", m.backend},
                     {"renormalize_output", m.renormalize_output},
                     {"conv_mass_tol", m.conv_mass_tol},
                     {"mean_drift_tol", m.mean_drift_tol}};
    j["seed"] = m.seed;
    if (m.iteration) {
        j["iteration"] = {{"eps", m.iteration->eps},
                          {"max_iter", m.iteration->max_iter},
                          {"initial", m.iteration->initial}};
    }
    if (m.simulation) {
        j["simulation"] = {{"agents", m.simulation->agents},
                           {"sweeps", m.simulation->sweeps},
                           {"initial", m.simulation->initial},
                           {"hist_x_max", m.simulation->hist_x_max},
                           {"hist_n", m.simulation->hist_n}};
    }
    if (m.probe) {
        j["probe"] = {{"amplitude", m.probe->amplitude}, {"mode", m.probe->mode}};
    }
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["termination"] = m.termination;
    if (m.summary) j["summary"] = to_json(*m.summary);

    std::ofstream out = open_for_write(path, "write_manifest");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("wex::write_manifest: write failed for " + path.string());
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path, "read_manifest");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("wex::read_manifest: " + path.string() + " is not valid JSON: " +
                                 e.what());
    }
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kManifestSchemaVersion) {
            throw std::runtime_error("wex::read_manifest: unsupported schema version " +
                                     std::to_string(version) + " (this build reads version " +
                                     std::to_string(kManifestSchemaVersion) + ")");
        }
        RunManifest m;
        m.schema_version = version;
        m.artifact_version = j.at("artifact_version").get<std::string>();
        m.command = j.at("command").get<std::string>();
        m.x_max = j.at("grid").at("x_max").get<double>();
        m.n = j.at("grid").at("n").get<int>();
        const json& op = j.at("operator");
        m.backend = op.at("backend").get<std::string>();
        m.renormalize_output = op.at("renormalize_output").get<bool>();
        m.conv_mass_tol = op.at("conv_mass_tol").get<double>();
        m.mean_drift_tol = op.at("mean_drift_tol").get<double>();
        m.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("iteration")) {
            const json& it = j.at("iteration");
            m.iteration = IterationSection{it.at("eps").get<double>(),
                                           it.at("max_iter").get<int>(),
                                           it.at("initial").get<std::string>()};
        }
        if (j.contains("simulation")) {
            const json& sim = j.at("simulation");
            m.simulation = SimulationSection{
                sim.at("agents").get<std::int64_t>(), sim.at("sweeps").get<std::int64_t>(),
                sim.at("initial").get<std::string>(), sim.at("hist_x_max").get<double>(),
                sim.at("hist_n").get<int>()};
        }
        if (j.contains("probe")) {
            m.probe = ProbeSection{j.at("probe").at("amplitude").get<double>(),
                                   j.at("probe").at("mode").get<std::string>()};
        }
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        m.termination = j.at("termination").get<std::string>();
        if (j.contains("summary")) m.summary = fit_from_json(j.at("summary"));
        return m;
    } catch (const json::out_of_range& e) {
        // nlohmann names the missing key in the message
        throw std::runtime_error("wex::read_manifest: missing required field: " +
                                 std::string(e.what()));
    } catch (const json::type_error& e) {
        throw std::runtime_error("wex::read_manifest: wrong field type: " + std::string(e.what()));
    }
}

}  // namespace wex
