#include <doctest.h>

#include "wex/io.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliDir {
    fs::path dir;
    CliDir() {
        dir = fs::temp_directory_path() / ("wex_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~CliDir() { fs::remove_all(dir); }
};

int run(const std::string& args, const fs::path& dir, const std::string& tag) {
    const std::string cmd = std::string(WEXLAB_BIN) + " " + args + " >" +
                            (dir / (tag + ".out")).string() + " 2>" +
                            (dir / (tag + ".err")).string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("iterate writes outputs and reports convergence") {
    CliDir tmp;
    const fs::path out = tmp.dir / "run1";
    const int code = run("iterate --initial uniform:0,2 --eps 1e-6 --n 3001 --out " + out.string(),
                         tmp.dir, "it1");
    CHECK(code == 0);
    CHECK(fs::exists(out / "final.csv"));
    CHECK(fs::exists(out / "trace.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    const wex::RunManifest m = wex::read_manifest(out / "manifest.json");
    CHECK(m.termination == "converged");
    CHECK(m.command == "iterate");
    REQUIRE(m.iteration.has_value());
    CHECK(m.iteration->initial == "uniform:0,2");
    const wex::DensityField f = wex::read_density_csv(out / "final.csv");
    CHECK(wex::is_normalized(f));
}

TEST_CASE("iterate from the exponential start stops after one application") {
    CliDir tmp;
    const fs::path out = tmp.dir / "exp";
    const int code =
        run("iterate --initial exp --eps 5e-3 --n 1501 --out " + out.string(), tmp.dir, "it2");
    CHECK(code == 0);
    const wex::IterationTrace t = wex::read_trace(out / "trace.csv");
    CHECK(t.records.size() == 1);
}

TEST_CASE("iterate reports a stall with exit code 2 when eps is below the floor") {
    CliDir tmp;
    const fs::path out = tmp.dir / "stall";
    const int code = run("iterate --initial exp --eps 1e-14 --max-iter 5 --n 1501 --out " +
                             out.string(),
                         tmp.dir, "it3");
    CHECK(code == 2);
    CHECK(fs::exists(out / "final.csv"));  // stall still writes its outputs
    const wex::RunManifest m = wex::read_manifest(out / "manifest.json");
    CHECK(m.termination == "max_iter_reached");
}

TEST_CASE("iterate validation failures exit 1 and write nothing") {
    CliDir tmp;
    const fs::path out = tmp.dir / "never";
    CHECK(run("iterate --n 4 --out " + out.string(), tmp.dir, "it4") == 1);
    CHECK_FALSE(fs::exists(out));
    CHECK(slurp(tmp.dir / "it4.err").find("n must be at least") != std::string::npos);

    CHECK(run("iterate --initial nonsense:1 --out " + out.string(), tmp.dir, "it5") == 1);
    CHECK_FALSE(fs::exists(out));

    CHECK(run("iterate --out " + out.string() + " --eps 0", tmp.dir, "it6") == 1);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("manifest replay reproduces an iterate run byte for byte") {
    CliDir tmp;
    const fs::path a = tmp.dir / "a", b = tmp.dir / "b";
    REQUIRE(run("iterate --initial uniform:0,2 --eps 1e-6 --n 3001 --out " + a.string(), tmp.dir,
                "rep1") == 0);
    REQUIRE(run("iterate --manifest " + (a / "manifest.json").string() + " --out " + b.string(),
                tmp.dir, "rep2") == 0);
    CHECK(slurp(a / "final.csv") == slurp(b / "final.csv"));
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("simulate writes the histogram, report and manifest; seeds pin the bytes") {
    CliDir tmp;
    const fs::path a = tmp.dir / "s1", b = tmp.dir / "s2";
    const std::string flags = "simulate --agents 5000 --sweeps 50 --seed 9 --n 601 --out ";
    REQUIRE(run(flags + a.string(), tmp.dir, "sim1") == 0);
    REQUIRE(run(flags + b.string(), tmp.dir, "sim2") == 0);
    CHECK(fs::exists(a / "histogram.csv"));
    CHECK(fs::exists(a / "report.json"));
    CHECK(fs::exists(a / "manifest.json"));
    CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));

    const wex::RunManifest m = wex::read_manifest(a / "manifest.json");
    CHECK(m.command == "simulate");
    CHECK(m.seed == 9);
    REQUIRE(m.simulation.has_value());
    CHECK(m.simulation->agents == 5000);
}

TEST_CASE("simulate rejects a single agent") {
    CliDir tmp;
    CHECK(run("simulate --agents 1 --out " + (tmp.dir / "x").string(), tmp.dir, "sim3") == 1);
    CHECK_FALSE(fs::exists(tmp.dir / "x"));
}

TEST_CASE("simulate accepts every initial-shape spelling") {
    CliDir tmp;
    const std::string base = "simulate --agents 200 --sweeps 5 --n 601 --out ";
    CHECK(run(base + (tmp.dir / "u").string() + " --initial uniform:0,2", tmp.dir, "ini1") == 0);
    CHECK(run(base + (tmp.dir / "e").string() + " --initial exp:0.5", tmp.dir, "ini2") == 0);
    CHECK(run(base + (tmp.dir / "q").string() + " --initial equal:2", tmp.dir, "ini3") == 0);
    CHECK(run(base + (tmp.dir / "z").string() + " --initial uniform:1,2", tmp.dir, "ini4") == 1);
    CHECK(run(base + (tmp.dir / "z").string() + " --initial equal:-1", tmp.dir, "ini5") == 1);
    const wex::RunManifest m = wex::read_manifest(tmp.dir / "q" / "manifest.json");
    REQUIRE(m.simulation.has_value());
    CHECK(m.simulation->initial == "equal:2");
}

TEST_CASE("compare prints one line per metric and rejects grid mismatches") {
    CliDir tmp;
    const fs::path a = tmp.dir / "ca";
    REQUIRE(run("iterate --initial exp --eps 5e-3 --n 1501 --out " + a.string(), tmp.dir,
                "cmp0") == 0);
    const std::string final_csv = (a / "final.csv").string();
    CHECK(run("compare " + final_csv + " " + final_csv, tmp.dir, "cmp1") == 0);
    const std::string out = slurp(tmp.dir / "cmp1.out");
    CHECK(out.find("left.rate_mle ") != std::string::npos);
    CHECK(out.find("right.gini ") != std::string::npos);
    CHECK(out.find("pair.l1 0\n") != std::string::npos);
    CHECK(out.find("pair.kl ") != std::string::npos);

    const fs::path c = tmp.dir / "cc";
    REQUIRE(run("iterate --initial exp --eps 5e-3 --n 601 --out " + c.string(), tmp.dir,
                "cmp2") == 0);
    CHECK(run("compare " + final_csv + " " + (c / "final.csv").string(), tmp.dir, "cmp3") == 1);
    CHECK(slurp(tmp.dir / "cmp3.err").find("grids differ") != std::string::npos);
}

TEST_CASE("iterate accepts a custom density as the start") {
    CliDir tmp;
    const fs::path seed_run = tmp.dir / "seed";
    REQUIRE(run("iterate --initial uniform:0,3 --eps 5e-3 --n 1501 --out " + seed_run.string(),
                tmp.dir, "cust0") == 0);
    const fs::path out = tmp.dir / "fromfile";
    const int code = run("iterate --initial custom:" + (seed_run / "final.csv").string() +
                             " --eps 5e-3 --n 1501 --out " + out.string(),
                         tmp.dir, "cust1") ;
    CHECK(code == 0);
    CHECK(fs::exists(out / "final.csv"));

    // grid mismatch between the file and --n is a validation error
    CHECK(run("iterate --initial custom:" + (seed_run / "final.csv").string() +
                  " --n 601 --out " + (tmp.dir / "no").string(),
              tmp.dir, "cust2") == 1);
    CHECK_FALSE(fs::exists(tmp.dir / "no"));
}

TEST_CASE("compare an agent histogram against an operator run") {
    CliDir tmp;
    const fs::path sim = tmp.dir / "sim", op = tmp.dir / "op";
    REQUIRE(run("simulate --agents 20000 --sweeps 100 --seed 4 --n 601 --out " + sim.string(),
                tmp.dir, "mix0") == 0);
    REQUIRE(run("iterate --initial uniform:0,2 --eps 5e-5 --n 601 --out " + op.string(), tmp.dir,
                "mix1") == 0);
    CHECK(run("compare " + (sim / "histogram.csv").string() + " " + (op / "final.csv").string(),
              tmp.dir, "mix2") == 0);
    const std::string out = slurp(tmp.dir / "mix2.out");
    CHECK(out.find("pair.l1 ") != std::string::npos);
    CHECK(out.find("left.rate_mle ") != std::string::npos);
}

TEST_CASE("probe writes the contraction report") {
    CliDir tmp;
    const fs::path out = tmp.dir / "probe";
    const int code = run("probe --amplitude 0.05 --mode sine --n 1501 --out " + out.string(),
                         tmp.dir, "pr1");
    CHECK(code == 0);
    CHECK(fs::exists(out / "probe.json"));
    const std::string body = slurp(out / "probe.json");
    CHECK(body.find("geometric_mean") != std::string::npos);
    CHECK(body.find("ratios") != std::string::npos);
    const wex::RunManifest m = wex::read_manifest(out / "manifest.json");
    CHECK(m.command == "probe");
    REQUIRE(m.probe.has_value());
    CHECK(m.probe->mode == "sine");
    CHECK(m.probe->amplitude == 0.05);

    CHECK(run("probe --amplitude 9 --out " + (tmp.dir / "nope").string(), tmp.dir, "pr2") == 1);
    CHECK_FALSE(fs::exists(tmp.dir / "nope"));
}

TEST_CASE("unknown flags and subcommands exit 1") {
    CliDir tmp;
    CHECK(run("fly --to the-moon", tmp.dir, "bad1") == 1);
    CHECK(run("iterate --frobnicate 3 --out x", tmp.dir, "bad2") == 1);
}

}  // TEST_SUITE
