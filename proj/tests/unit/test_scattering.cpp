#include <doctest.h>

#include <cmath>

#include "sgkdv/noise.hpp"
#include "sgkdv/rng.hpp"
#include "sgkdv/scattering.hpp"
#include "sgkdv/solver.hpp"
#include "sgkdv/spectral.hpp"

using namespace sgkdv;

namespace {

SpaceTimeTrace random_trace(const GridPtr& g, std::uint64_t seed, std::size_t steps) {
    NormalStream s(seed);
    SpaceTimeTrace tr(g, 0.0, 0.5, steps);
    for (double& v : tr.data()) v = s.next();
    return tr;
}

ScatterConfig base_config(double noise_amplitude) {
    const GridPtr g = make_grid(2048, 512.0);
    ScatterConfig c;
    c.solver.grid = g;
    c.solver.k = 4;
    c.solver.dt = 0.05;
    c.u0 = Field::sample(g, [](double x) { return std::exp(-x * x / 2); });
    c.u0 *= 0.1 / l2_norm(c.u0);
    c.noise.phi = Field::sample(g, [](double x) { return std::exp(-x * x / 2); });
    c.noise.envelope = noise_amplitude == 0.0 ? Envelope::zero() : Envelope::power(0.7, noise_amplitude);
    return c;
}

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("decomposition") {
    const GridPtr g = make_grid(32, 10.0);
    const SpaceTimeTrace u = random_trace(g, 1, 6), z = random_trace(g, 2, 6);
    SpaceTimeTrace zero(g, 0.0, 0.5, 6);
    CHECK(decompose(u, zero).data() == u.data());
    const SpaceTimeTrace us = decompose(u, z);
    for (std::size_t i = 0; i < u.data().size(); ++i) CHECK(us.data()[i] + z.data()[i] == doctest::Approx(u.data()[i]));
}

TEST_CASE("scattering size") {
    const GridPtr g = make_grid(32, 10.0);
    CHECK(scattering_size(SpaceTimeTrace(g, 0.0, 0.5, 6), 4) == 0.0);
    const Field f = Field::sample(g, [](double x) { return std::cos(x) + 0.3; });
    SpaceTimeTrace c(g, 0.0, 0.5, 6);
    for (std::size_t i = 0; i < c.size(); ++i) c.set(i, f);
    CHECK(scattering_size(c, 4) == doctest::Approx(std::pow(3.0, 0.1) * lp_norm(f, 5.0)).epsilon(1e-12));
    const SpaceTimeTrace r = random_trace(g, 3, 8);
    CHECK(scattering_size(r, 6) == doctest::Approx(mixed_norm_xt(r, 7.5, 15.0)).epsilon(1e-14));
}

TEST_CASE("linear flow has zero increments") {
    const GridPtr g = make_grid(256, 80.0);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.sign = 0;
    cfg.dt = 0.05;
    SimulationRequest req;
    req.steps = 400;
    const Field u0 = Field::sample(g, [](double x) { return std::exp(-x * x); });
    const SimulationResult r = simulate(u0, cfg, req);
    const ScatteringReport rep = scattering_diagnostic(r.trace, {5.0, 10.0, 20.0}, PullbackSpace::L2, 4);
    for (double inc : rep.cauchy_increments) CHECK(inc <= 1e-12);
    const ScatteringReport h1 = scattering_diagnostic(r.trace, {5.0, 10.0, 20.0}, PullbackSpace::H1, 6);
    for (double inc : h1.cauchy_increments) CHECK(inc <= 1e-12);
    CHECK_THROWS(scattering_diagnostic(r.trace, {5.0, 10.0}, PullbackSpace::L2, 4));
}

TEST_CASE("no noise means no tail and no v") {
    ScatterConfig c = base_config(0.0);
    c.horizon = 10.0;
    c.checkpoints = {2.5, 5.0, 10.0};
    c.v_starts = {2.5, 5.0};
    const ScatterPathResult r = scatter_path(c, 1);
    for (double v : r.v_size) CHECK(v == 0.0);
    CHECK(r.tail_residual == 0.0);
}

TEST_CASE("difference form agrees with the naive v") {
    ScatterConfig c = base_config(1e-2);
    c.horizon = 10.0;
    c.checkpoints = {2.5, 5.0, 10.0};
    c.v_starts = {2.5, 5.0};
    const ScatterPathResult r = scatter_path(c, 2);
    CHECK(r.v_naive_gap <= 1e-12);
    for (double v : r.v_size) CHECK(v > 0.0);
}

TEST_CASE("deterministic small data scatters") {
    ScatterConfig c = base_config(0.0);
    const ScatterPathResult r = scatter_path(c, 1);
    CHECK(increments_decrease(r.report.cauchy_increments));
    CHECK(r.report.cauchy_increments.back() <= 1e-3);
}

TEST_CASE("trend helpers") {
    CHECK(increments_decrease({3, 2, 1}));
    CHECK_FALSE(increments_decrease({3, 3, 1}));
    CHECK(nonincreasing({3, 3, 1}));
    CHECK_FALSE(nonincreasing({1, 2}));
}

}
