// Desk-scale acceptance gates. One PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../fixtures/admissibility_table.hpp"
#include "sgkdv/ensemble.hpp"
#include "sgkdv/estimates.hpp"
#include "sgkdv/noise.hpp"
#include "sgkdv/oscillatory.hpp"
#include "sgkdv/scattering.hpp"
#include "sgkdv/solver.hpp"
#include "sgkdv/spectral.hpp"

using namespace sgkdv;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string num(double v, int prec = 4) {
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

// Ai from Bessel functions of order 1/3, independent of the library's series.
double airy_bessel(double x) {
    if (x == 0.0) return 0.35502805388781723926;
    const double z = 2.0 / 3.0 * std::pow(std::abs(x), 1.5);
    if (x > 0) return std::sqrt(x / 3.0) / pi * std::cyl_bessel_k(1.0 / 3.0, z);
    const double j = std::cyl_bessel_j(1.0 / 3.0, z), y = std::cyl_neumann(1.0 / 3.0, z);
    return std::sqrt(-x) / 3.0 * (j + 0.5 * j - std::sqrt(3.0) / 2.0 * y);
}

NoiseSpec gaussian_noise(const GridPtr& g, Envelope env) {
    NoiseSpec s;
    s.phi = Field::sample(g, [](double x) { return std::exp(-x * x / 2); });
    s.envelope = std::move(env);
    return s;
}

double phi_mass(const NoiseSpec& s) { return mass(s.phi); }

// 1 -------------------------------------------------------------------------
Outcome airy_oracle() {
    double worst = 0.0;
    for (int i = -40; i <= 40; ++i) {
        const double x = 0.5 * i;
        const double ref = 2 * pi * std::pow(3.0, -1.0 / 3) * airy_bessel(std::pow(3.0, -1.0 / 3) * x);
        worst = std::max(worst, std::abs(osc_integral_I({3, 0, x, std::nullopt}).value - ref));
    }
    return {worst <= 1e-6, "max error " + num(worst) + " (tol 1e-6)"};
}

// 2 -------------------------------------------------------------------------
Outcome decay_slopes() {
    const std::vector<std::pair<double, double>> pairs{{3, -0.75}, {3, -0.6}, {3, 0}, {3, 0.25}, {3, 0.5},
                                                       {3, 1.0},   {3, 1.4},  {2, -0.75}, {2, 0}, {2, 0.5}};
    const std::vector<double> pts = geometric_points(100, 1e4, 15);
    std::vector<double> check;
    for (int i = 0; i <= 100; ++i) check.push_back(100 * std::pow(100.0, i / 100.0) + 0.37 * i);
    bool ok = true;
    double worst_dev = 0.0, worst_ratio = 0.0;
    std::string bad;
    for (auto [b, a] : pairs) {
        const DecayFit f = fit_decay_slope(b, a, designated_branch(a), pts);
        const EnvelopeBound eb = envelope_bound(b, a, f.predicted_exponent, pts, check);
        const double dev = std::abs(f.fitted_exponent - f.predicted_exponent);
        worst_dev = std::max(worst_dev, dev);
        worst_ratio = std::max(worst_ratio, eb.worst_ratio);
        if (dev > 0.1 || !eb.holds) {
            ok = false;
            bad += " (b=" + num(b) + ", a=" + num(a) + ")";
        }
    }
    return {ok, "worst slope deviation " + num(worst_dev) + " (tol 0.1), worst envelope ratio " + num(worst_ratio) +
                    (bad.empty() ? "" : ", failing" + bad)};
}

// 3 -------------------------------------------------------------------------
Outcome evenness_and_scaling() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(-40, 40), u01(0, 1);
    const double bs[] = {1.5, 2.5, 2.0, 3.0, 4.0};
    int even_fail = 0, scale_fail = 0;
    for (int i = 0; i < 50; ++i) {
        const double b = bs[i % 5];
        const double a = -0.9 + u01(rng) * (std::min(1.4, b - 1.05) + 0.9);
        const double x = ux(rng);
        const OscResult p = osc_integral_J({b, a, x, std::nullopt}), m = osc_integral_J({b, a, -x, std::nullopt});
        if (!(std::abs(p.value - m.value) <= 2 * std::max(p.abs_error, m.abs_error))) ++even_fail;
    }
    for (int i = 0; i < 20; ++i) {
        const double b = i % 2 ? 3.0 : 2.0;
        const double a = -0.8 + u01(rng) * (b - 1.05 + 0.8);
        const double x = ux(rng) / 4, t = std::exp(std::log(0.25) + u01(rng) * std::log(16.0));
        const OscResult s = osc_integral_scaled({b, a, x, t}), d = osc_integral_direct({b, a, x, t});
        if (!(std::abs(s.value - d.value) <= s.abs_error + d.abs_error)) ++scale_fail;
    }
    return {even_fail == 0 && scale_fail == 0,
            std::to_string(even_fail) + "/50 evenness and " + std::to_string(scale_fail) + "/20 scaling violations"};
}

// 4 -------------------------------------------------------------------------
Outcome ito_isometry() {
    const GridPtr g = make_grid(256, 40.0);
    const NoiseSpec s = gaussian_noise(g, Envelope::power(0.7));
    const double dt = 1e-3;
    const std::vector<double> t{1.0, 5.0};
    const std::vector<std::size_t> steps{1000, 5000};
    const EnsembleStats st = ensemble_run(
        "z_norm2", t, [&](std::uint64_t seed) { return convolution_norms(s, sample_path(seed, dt, 5000), steps); },
        2000, 404, jobs());
    bool ok = st.errors.empty();
    std::string d;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ex = phi_mass(s) * s.envelope.mass(0.0, t[i]);
        const double dev = std::abs(st.mean[i] - ex);
        ok = ok && dev <= 3 * st.standard_error[i];
        d += "z(" + num(t[i]) + "): " + num(dev / st.standard_error[i], 3) + " SE; ";
    }
    TailDecayOptions opt;
    const TailDecayFit tf = tail_decay_probe(s, {10.0, 50.0}, 2000, opt);
    for (std::size_t i = 0; i < tf.t.size(); ++i) {
        const double dev = std::abs(tf.mean[i] - tf.expected[i]);
        ok = ok && dev <= 3 * tf.standard_error[i];
        d += "z*(" + num(tf.t[i]) + "): " + num(dev / tf.standard_error[i], 3) + " SE; ";
    }
    const bool slope_ok = std::abs(tf.slope - (1 - 2 * 0.7)) <= 0.05;
    return {ok && slope_ok, d + "tail slope " + num(tf.slope) + " (target -0.4 +- 0.05)"};
}

// 5 -------------------------------------------------------------------------
std::pair<double, double> conservation_drift(double dt) {
    const GridPtr g = make_grid(512, 60.0);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.dt = dt;
    SimulationRequest req;
    req.steps = static_cast<std::size_t>(std::llround(1.0 / dt));
    const Field u0 = Field::sample(g, [](double x) { return 0.5 * std::exp(-x * x) * std::cos(x); });
    const SimulationResult r = simulate(u0, cfg, req);
    double dm = 0, de = 0;
    for (std::size_t i = 0; i < r.mass.size(); ++i) {
        dm = std::max(dm, std::abs(r.mass[i] / r.mass[0] - 1));
        de = std::max(de, std::abs(r.energy[i] / r.energy[0] - 1));
    }
    return {dm, de};
}

Outcome conservation() {
    const auto [m1, e1] = conservation_drift(2e-3);
    const auto [m2, e2] = conservation_drift(1e-3);
    const bool ok = m2 <= 1e-10 && e2 <= 1e-8 && m1 / m2 >= 8 && e1 / e2 >= 8;
    return {ok, "mass drift " + num(m2) + ", energy drift " + num(e2) + ", halving gains " + num(m1 / m2, 3) + "x / " +
                    num(e1 / e2, 3) + "x"};
}

// 6 -------------------------------------------------------------------------
Outcome soliton_oracle() {
    const double residual = soliton_residual(4);
    if (!(residual <= 1e-10)) return {false, "adoption gate residual " + num(residual)};
    const GridPtr g = make_grid(1024, 80.0);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.sign = -1;
    cfg.dt = 1e-3;
    SimulationRequest req;
    req.steps = 1000;
    req.stride = 1000;
    const SimulationResult r = simulate(soliton(4, 1.0, 0.0, g), cfg, req);
    const double err = l2_norm(r.trace.field(1) - soliton(4, 1.0, 1.0, g));
    return {err <= 1e-4, "residual " + num(residual) + ", shape error " + num(err) + " (tol 1e-4)"};
}

// 7 -------------------------------------------------------------------------
Outcome expected_mass() {
    const GridPtr g = make_grid(256, 40.0);
    SolverConfig cfg;
    cfg.grid = g;
    cfg.dt = 1e-2;
    const NoiseSpec s = gaussian_noise(g, Envelope::power(0.7, 0.5));
    const Field u0 = Field::sample(g, [](double x) { return 0.3 * std::exp(-x * x); });
    const std::vector<double> t{0.5, 1.0, 2.0};
    const EnsembleStats st = ensemble_run(
        "mass", t,
        [&](std::uint64_t seed) {
            const BrownianPath p = sample_path(seed, cfg.dt, 200);
            SimulationRequest req;
            req.steps = 200;
            req.stride = 50;
            req.noise = &s;
            req.path = &p;
            const SimulationResult r = simulate(u0, cfg, req);
            return std::vector<double>{r.mass[1], r.mass[2], r.mass[4]};
        },
        1000, 707, jobs());
    bool ok = st.errors.empty();
    std::string d;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ex = mass(u0) + phi_mass(s) * s.envelope.mass(0.0, t[i]);
        const double dev = std::abs(st.mean[i] - ex);
        ok = ok && dev <= 3 * st.standard_error[i];
        d += "t=" + num(t[i]) + ": " + num(dev / st.standard_error[i], 3) + " SE; ";
    }
    return {ok, d + std::to_string(st.errors.size()) + " failed paths"};
}

// 8 -------------------------------------------------------------------------
Outcome admissibility_and_probes() {
    int mismatches = 0;
    for (const auto& c : admissibility_table()) {
        const bool got = c.kato ? validate_kato(c.p, c.q, c.order).ok : validate_strichartz(c.p, c.q, c.order).ok;
        if (got != c.expected) ++mismatches;
    }
    const KatoTriple f0 = kato_family_for_pq_order(0.0);
    if (std::abs(f0.p.value() - 5) > 1e-12 || std::abs(f0.q.value() - 10) > 1e-12) ++mismatches;
    const std::vector<ProbeDatum> data = probe_data(1, 100);
    const ProbeConfig cfg;
    const ProbeResult a = kato_constant_probe({5.0, 10.0, 0.0}, data, cfg);
    const ProbeResult b = kato_constant_probe({kInf, 2.0, 1.0}, data, cfg);
    const ProbeResult c = strichartz_constant_probe({kInf, 6.0, 0.0}, data, cfg);
    const bool ok = mismatches == 0 && a.stable() && b.stable() && c.stable();
    return {ok, std::to_string(mismatches) + " table mismatches; refinement changes " + num(a.relative_change, 3) +
                    ", " + num(b.relative_change, 3) + ", " + num(c.relative_change, 3) + " (tol 0.05)"};
}

// 9 -------------------------------------------------------------------------
Outcome beta_functionals_gate() {
    const GridPtr g = make_grid(128, 40.0);
    const double dt = 1e-2;
    SpaceTimeTrace zero(g, 0.0, dt, 800);
    const BetaValues b0 = beta_functionals(zero, 4, 8.0);
    const bool zeros = b0.alpha1 == 0 && b0.alpha2 == 0 && b0.alpha3 == 0 && b0.alpha4 == 0;
    const NoiseSpec s = gaussian_noise(g, Envelope::constant(1.0));
    const std::vector<double> T{1, 2, 4, 8};
    double worst34 = 0.0;
    std::mutex mu;
    const EnsembleStats st = ensemble_run(
        "alpha1_sq", T,
        [&](std::uint64_t seed) {
            const SpaceTimeTrace z = stochastic_convolution(s, sample_path(seed, dt, 800));
            std::vector<double> v;
            for (double t : T) {
                const BetaValues b = beta_functionals(z, 4, t);
                {
                    std::lock_guard<std::mutex> lk(mu);
                    worst34 = std::max(worst34, std::abs(b.alpha3 - b.alpha4));
                }
                v.push_back(b.alpha1 * b.alpha1);
            }
            return v;
        },
        200, 909, jobs());
    const double slope = log_log_slope(T, st.mean);
    const bool ok = zeros && worst34 <= 1e-9 && slope >= 0.8 && slope <= 1.2 && st.errors.empty();
    return {ok, std::string(zeros ? "zero input gives zeros" : "zero input NOT zero") + ", max |a3 - a4| " +
                    num(worst34) + ", slope " + num(slope) + " (range [0.8, 1.2])"};
}

// 10 ------------------------------------------------------------------------
Outcome scattering_variant(int k, double noise_amplitude, std::string& line) {
    const GridPtr g = make_grid(2048, 512.0);
    ScatterConfig c;
    c.solver.grid = g;
    c.solver.k = k;
    c.solver.dt = 0.05;
    c.u0 = Field::sample(g, [](double x) { return std::exp(-x * x / 2); });
    c.u0 *= 0.1 / l2_norm(c.u0);
    c.noise = gaussian_noise(g, Envelope::power(0.7, noise_amplitude));
    const auto seeds = ensemble_seeds(1010 + static_cast<std::uint64_t>(k), 20);
    int a = 0, b = 0, failed = 0;
    double worst_final = 0.0;
    for (std::uint64_t seed : seeds) {
        try {
            const ScatterPathResult r = scatter_path(c, seed);
            const auto& inc = r.report.cauchy_increments;
            worst_final = std::max(worst_final, inc.back());
            if (increments_decrease(inc) && inc.back() <= 1e-3) ++a;
            if (nonincreasing(r.v_size)) ++b;
        } catch (const std::exception&) {
            ++failed;
        }
    }
    line = "k=" + std::to_string(k) + ": (a) " + std::to_string(a) + "/20, (b) " + std::to_string(b) +
           "/20, worst final increment " + num(worst_final) + ", " + std::to_string(failed) + " failed";
    return {a >= 18 && b >= 18, line};
}

Outcome scattering_trends() {
    std::string l4, l6;
    const Outcome k4 = scattering_variant(4, 1e-10, l4);
    const Outcome k6 = scattering_variant(6, 1e-13, l6);
    return {k4.pass && k6.pass, l4 + "; " + l6};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Airy oracle", airy_oracle},
        {"decay slopes and envelope bound", decay_slopes},
        {"evenness and scaling", evenness_and_scaling},
        {"Ito isometry and tail decay", ito_isometry},
        {"conservation", conservation},
        {"soliton oracle", soliton_oracle},
        {"expected mass under noise", expected_mass},
        {"admissibility and probes", admissibility_and_probes},
        {"beta functionals", beta_functionals_gate},
        {"scattering trends", scattering_trends},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("criterion %zu %s: %s [%s] (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
