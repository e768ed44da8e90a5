#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sgkdv/error.hpp"
#include "sgkdv/noise.hpp"
#include "sgkdv/solver.hpp"
#include "sgkdv/spectral.hpp"

using namespace sgkdv;
using std::numbers::pi;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

SolverConfig config(const GridPtr& g, int k, int sign, double dt) {
    SolverConfig c;
    c.grid = g;
    c.k = k;
    c.sign = sign;
    c.dt = dt;
    return c;
}

Field small_data(const GridPtr& g) {
    return Field::sample(g, [](double x) { return 0.5 * std::exp(-x * x) * std::cos(x); });
}

// max relative drift of mass and energy over t in [0, 1]
std::pair<double, double> drifts(double dt) {
    const GridPtr g = make_grid(512, 60.0);
    const SolverConfig cfg = config(g, 4, 1, dt);
    SimulationRequest req;
    req.steps = static_cast<std::size_t>(std::llround(1.0 / dt));
    const SimulationResult r = simulate(small_data(g), cfg, req);
    double dm = 0, de = 0;
    for (std::size_t i = 0; i < r.mass.size(); ++i) {
        dm = std::max(dm, std::abs(r.mass[i] / r.mass[0] - 1));
        de = std::max(de, std::abs(r.energy[i] / r.energy[0] - 1));
    }
    return {dm, de};
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("nonlinear term") {
    const GridPtr g = make_grid(256, 2 * pi);
    CHECK(max_abs_diff(nonlinear_term(Field(g), 4, 1), Field(g)) == 0.0);
    const Field c = Field::sample(g, [](double) { return 0.7; });
    CHECK(max_abs_diff(nonlinear_term(c, 4, 1), Field(g)) <= 1e-14);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field ref = Field::sample(g, [](double x) { return 5 * std::pow(std::sin(x), 4) * std::cos(x); });
    CHECK(max_abs_diff(nonlinear_term(s, 4, 1), ref) <= 1e-10);
    CHECK(max_abs_diff(nonlinear_term(s, 4, -1), -1.0 * ref) <= 1e-10);
    CHECK(max_abs_diff(nonlinear_term(s, 4, 0), Field(g)) == 0.0);
}

TEST_CASE("deterministic step") {
    const GridPtr g = make_grid(256, 40.0);
    const SolverConfig cfg = config(g, 4, 1, 1e-3);
    CHECK(max_abs_diff(step_deterministic(Field(g), cfg), Field(g)) == 0.0);
    const Field u = small_data(g);
    const SolverConfig lin = config(g, 4, 0, 1e-3);
    CHECK(max_abs_diff(step_deterministic(u, lin), airy_propagate(u, 1e-3)) <= 1e-12);

    SolverConfig bad = cfg;
    bad.dt = 2 * g->spacing();
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.dealias = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("instability guard") {
    const GridPtr g = make_grid(256, 40.0);
    const SolverConfig cfg = config(g, 4, -1, 0.1);
    const Field big = Field::sample(g, [](double x) { return 40.0 * std::exp(-x * x); });
    SimulationRequest req;
    req.steps = 50;
    CHECK_THROWS_AS(simulate(big, cfg, req), InstabilityError);
}

TEST_CASE("stochastic step") {
    const GridPtr g = make_grid(256, 40.0);
    const SolverConfig cfg = config(g, 4, 1, 1e-3);
    NoiseSpec s;
    s.phi = Field::sample(g, [](double x) { return std::exp(-x * x / 2); });
    s.envelope = Envelope::power(0.7, 1.3);
    const Field u = small_data(g);
    CHECK(max_abs_diff(step_stochastic(u, cfg, s, 0.0, 0.4), step_deterministic(u, cfg)) == 0.0);

    const double dB = 0.03, t = 0.4, gt = s.envelope(t);
    const Field v = step_deterministic(u, cfg);
    const Field w = step_stochastic(u, cfg, s, dB, t);
    const double expect = 2 * gt * dB * inner(v, s.phi) + gt * gt * dB * dB * mass(s.phi);
    CHECK(std::abs(mass(w) - mass(v) - expect) <= 1e-14);

    // linear flow: u_n against V(t) u0 + the stochastic convolution, shrinking like sqrt(dt)
    double prev = 0.0;
    for (double dt : {1e-2, 2.5e-3}) {
        const SolverConfig lin = config(g, 4, 0, dt);
        const std::size_t m = static_cast<std::size_t>(std::llround(1.0 / dt));
        const BrownianPath p = sample_path(21, dt, m);
        SimulationRequest req;
        req.steps = m;
        req.noise = &s;
        req.path = &p;
        const SimulationResult r = simulate(u, lin, req);
        const SpaceTimeTrace z = stochastic_convolution(s, p);
        const double err = l2_norm(r.trace.field(m) - (airy_propagate(u, 1.0) + z.field(m)));
        CHECK(err <= 5 * std::sqrt(dt) * l2_norm(s.phi));
        if (prev > 0) CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("mass and energy") {
    const GridPtr g = make_grid(256, 2 * pi);
    CHECK(mass(Field(g)) == 0.0);
    CHECK(energy(Field(g), 4, 1) == 0.0);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    CHECK(mass(s) == doctest::Approx(pi).epsilon(1e-13));
    // trapezoid sum of cos^2/2 + sin^6/6, exact for trigonometric polynomials of this degree
    double q = 0.0;
    for (std::size_t j = 0; j < g->n(); ++j) {
        const double x = g->point(j);
        q += (0.5 * std::pow(std::cos(x), 2) + std::pow(std::sin(x), 6) / 6) * g->spacing();
    }
    CHECK(energy(s, 4, 1) == doctest::Approx(q).epsilon(1e-13));
    CHECK(energy(s, 4, 1) == doctest::Approx(pi / 2 + 5 * pi / 48).epsilon(1e-13));
    CHECK(energy(s, 4, -1) == doctest::Approx(pi / 2 - 5 * pi / 48).epsilon(1e-13));
}

TEST_CASE("conservation") {
    const auto [m1, e1] = drifts(2e-3);
    const auto [m2, e2] = drifts(1e-3);
    CHECK(m2 <= 1e-10);
    CHECK(e2 <= 1e-8);
    CHECK(m1 / m2 >= 8);
    CHECK(e1 / e2 >= 8);
}

TEST_CASE("Ito drift terms") {
    const GridPtr g = make_grid(256, 40.0);
    NoiseSpec s;
    s.phi = Field::sample(g, [](double x) { return std::exp(-x * x / 2); });
    s.envelope = Envelope::zero();
    const Field u = small_data(g);
    const EnergyReport z = ito_drift(u, s, 1.0, 4);
    CHECK(z.F1 == 0.0);
    CHECK(z.F2 == 0.0);
    CHECK(z.drift == 0.0);

    s.envelope = Envelope::constant(1.7);
    const EnergyReport r = ito_drift(Field(g), s, 1.0, 4);
    // |phi|^2 = sqrt(pi), |phi_x|^2 = sqrt(pi)/2 for exp(-x^2/2)
    const double g2 = 1.7 * 1.7;
    CHECK(r.F1 == 0.0);
    CHECK(r.F2 == doctest::Approx(g2 * (std::sqrt(pi) + std::sqrt(pi) / 2)).epsilon(1e-12));
    CHECK(r.drift == doctest::Approx(g2 * (std::sqrt(pi) + std::sqrt(pi) / 4)).epsilon(1e-12));
}

TEST_CASE("soliton") {
    CHECK(soliton_residual(4) <= 1e-10);
    CHECK(soliton_residual(6) <= 1e-10);
    const GridPtr g = make_grid(1024, 80.0);
    const double x0 = 16 * g->spacing();
    const Field a = soliton(4, 1.0, x0, g), b = soliton(4, 1.0, 0.0, g);
    double worst = 0.0;
    for (std::size_t j = 0; j < g->n(); ++j) worst = std::max(worst, std::abs(a[(j + 16) % g->n()] - b[j]));
    CHECK(worst <= 1e-12);
    CHECK_THROWS(soliton(4, 1.0, 0.0, g, 1));

    const SolverConfig cfg = config(g, 4, -1, 1e-3);
    SimulationRequest req;
    req.steps = 1000;
    req.stride = 1000;
    const SimulationResult r = simulate(b, cfg, req);
    CHECK(l2_norm(r.trace.field(1) - soliton(4, 1.0, 1.0, g)) <= 1e-4);
}

}
