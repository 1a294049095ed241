#include <doctest.h>

#include "fields.hpp"
#include "wex/analysis.hpp"
#include "wex/fixed_point.hpp"

#include <cmath>

using namespace wex;
using wex::testing::bimodal_field;
using wex::testing::triangular_field;

TEST_SUITE("fixed_point") {

TEST_CASE("entropy matches analytic values") {
    // unit exponential: entropy 1
    const Grid g30 = make_grid(30.0, 3001);
    CHECK(std::abs(entropy(exponential_field(g30, 1.0)) - 1.0) <= 1e-3);

    // constant densities on their natural (jump-free) grids are exact
    const Grid g2 = make_grid(2.0, 2001);
    const DensityField u2 = normalize(discretize(g2, [](double) { return 0.5; }));
    CHECK(std::abs(entropy(u2) - std::log(2.0)) <= 1e-3);

    const Grid g1 = make_grid(1.0, 1001);
    const DensityField u1 = normalize(discretize(g1, [](double) { return 1.0; }));
    CHECK(std::abs(entropy(u1)) <= 1e-3);

    // zero values contribute nothing (0 ln 0 = 0)
    const DensityField spike = normalize(discretize(g30, [](double x) { return x < 1.0 ? 1.0 : 0.0; }));
    CHECK(std::isfinite(entropy(spike)));
}

TEST_CASE("iterate terminates immediately at the fixed point") {
    const Grid g = make_grid(30.0, 3001);
    const DensityField e = exponential_field(g, 1.0);
    IterationConfig it;
    it.eps = 5e-3;
    const IterateResult r = iterate(e, {}, it);
    CHECK(r.status == Termination::converged);
    CHECK(r.iterations == 1);
    CHECK(r.final_l1_prev < 5e-3);
    CHECK(l1_distance(r.density, e) <= 5e-3);
    CHECK(r.trace.records.size() == 1);
    CHECK(r.trace.records[0].n == 1);
}

TEST_CASE("iterate from the uniform reaches the exponential") {
    const Grid g = make_grid(30.0, 3001);
    const DensityField f0 = uniform_field(g, 0.0, 2.0);
    IterationConfig it;
    it.max_iter = 25;
    const IterateResult r = iterate(f0, {}, it);

    // pinned by the pre-build oracle run: first L1 below 1e-2 at n = 8
    int first = 0;
    for (const TraceRecord& rec : r.trace.records) {
        if (rec.l1_exp < 1e-2) {
            first = rec.n;
            break;
        }
    }
    CHECK(first == 8);
    CHECK(first <= 20);

    // successive-L1 floor sits above the default eps: stall is a status
    CHECK(r.status == Termination::max_iter_reached);

    // monotone approach (regression property)
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
        CHECK(r.trace.records[i].l1_exp <= r.trace.records[i - 1].l1_exp);
    }
    // mean invariance along the trajectory; indices strictly increasing
    const double mean0 = moment(f0, 1);
    int prev_n = 0;
    for (const TraceRecord& rec : r.trace.records) {
        CHECK(std::abs(rec.mean - mean0) <= 1e-3);
        CHECK(rec.n == prev_n + 1);
        prev_n = rec.n;
        CHECK(rec.l1_prev >= 0.0);
        CHECK(rec.l1_exp >= 0.0);
    }
}

TEST_CASE("iterate converges once eps sits above the discretization floor") {
    const Grid g = make_grid(30.0, 3001);
    IterationConfig it;
    it.eps = 1e-6;
    const IterateResult r = iterate(uniform_field(g, 0.0, 2.0), {}, it);
    CHECK(r.status == Termination::converged);
    CHECK(r.iterations <= 60);
    CHECK(r.final_l1_prev < 1e-6);
}

TEST_CASE("scaled start converges to the exponential of its own mean") {
    const Grid g = make_grid(30.0, 3001);
    const DensityField f0 = uniform_field(g, 0.0, 4.0);  // mean 2
    IterationConfig it;
    it.max_iter = 60;
    const IterateResult r = iterate(f0, {}, it);
    const double mean = moment(r.density, 1);
    CHECK(std::abs(mean - 2.0) <= 1e-3);
    CHECK(l1_distance(r.density, exponential_field(g, 2.0)) < 1e-2);
}

TEST_CASE("entropy grows from start to terminal iterate") {
    const Grid g = make_grid(30.0, 3001);
    IterationConfig it;
    it.max_iter = 30;
    for (const DensityField& f0 :
         {uniform_field(g, 0.0, 2.0), triangular_field(g), bimodal_field(g)}) {
        const IterateResult r = iterate(f0, {}, it);
        CHECK(r.trace.records.back().entropy >= entropy(f0));
    }
}

TEST_CASE("iterate validates its configuration") {
    const Grid g = make_grid(30.0, 3001);
    const DensityField e = exponential_field(g, 1.0);
    IterationConfig bad;
    bad.eps = 0.0;
    CHECK_THROWS_AS(iterate(e, {}, bad), std::invalid_argument);
    bad = {};
    bad.max_iter = 0;
    CHECK_THROWS_AS(iterate(e, {}, bad), std::invalid_argument);
}

TEST_CASE("iterate propagates operator errors and honors record_trace") {
    const Grid g = make_grid(30.0, 3001);
    const DensityField e = exponential_field(g, 1.0);

    OperatorConfig strict;
    strict.mean_drift_tol = 1e-16;
    CHECK_THROWS_AS(iterate(e, strict, {}), std::runtime_error);

    IterationConfig quiet;
    quiet.eps = 5e-3;
    quiet.record_trace = false;
    const IterateResult r = iterate(e, {}, quiet);
    CHECK(r.status == Termination::converged);
    CHECK(r.trace.records.empty());
    CHECK(r.iterations == 1);
}

TEST_CASE("probe contracts every shipped mode at amplitude 0.05") {
    const Grid g = make_grid(30.0, 3001);
    for (PerturbationMode mode :
         {PerturbationMode::laguerre, PerturbationMode::sine, PerturbationMode::dipole}) {
        const ContractionReport rep = probe_stability(g, 0.05, mode, {});
        REQUIRE(rep.distances.size() == 11);
        REQUIRE(rep.ratios.size() == 10);
        CHECK(rep.distances[0] > 1e-2);  // the perturbation is really there
        for (double r : rep.ratios) CHECK(r < 1.0);
        CHECK(rep.geometric_mean < 1.0);
        CHECK(rep.geometric_mean > 0.0);
    }
}

TEST_CASE("probe at zero amplitude stays at the discretization floor") {
    const Grid g = make_grid(30.0, 3001);
    const ContractionReport rep = probe_stability(g, 0.0, PerturbationMode::laguerre, {});
    for (std::size_t i = 0; i < rep.distances.size(); ++i) {
        CHECK(rep.distances[i] <= 5e-3);
    }
    // no ratio measured above the floor may exceed 1 + 1e-6
    for (std::size_t i = 1; i < rep.distances.size(); ++i) {
        if (rep.distances[i - 1] > 5e-3) {
            CHECK(rep.ratios[i - 1] <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("probe rejects amplitudes that drive the density negative") {
    const Grid g = make_grid(30.0, 3001);
    try {
        probe_stability(g, 1.5, PerturbationMode::laguerre, {});
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("amplitude") != std::string::npos);
    }
}

TEST_CASE("mode and termination names round-trip") {
    for (const char* name : {"laguerre", "sine", "dipole"}) {
        CHECK(to_string(perturbation_mode_from_string(name)) == name);
    }
    CHECK_THROWS_AS(perturbation_mode_from_string("linear"), std::invalid_argument);
    CHECK(to_string(Termination::converged) == "converged");
    CHECK(to_string(Termination::max_iter_reached) == "max_iter_reached");
}

}  // TEST_SUITE
