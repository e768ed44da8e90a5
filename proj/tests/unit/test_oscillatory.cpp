#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sgkdv/oscillatory.hpp"
#include "sgkdv/quadrature.hpp"

using namespace sgkdv;
using std::numbers::pi;

namespace {

// Ai through Bessel functions of order 1/3.
double airy_bessel(double x) {
    if (x == 0.0) return 0.35502805388781723926;
    const double z = 2.0 / 3.0 * std::pow(std::abs(x), 1.5);
    if (x > 0) return std::sqrt(x / 3.0) / pi * std::cyl_bessel_k(1.0 / 3.0, z);
    const double j = std::cyl_bessel_j(1.0 / 3.0, z), y = std::cyl_neumann(1.0 / 3.0, z);
    const double jm = 0.5 * j - std::sqrt(3.0) / 2.0 * y;
    return std::sqrt(-x) / 3.0 * (j + jm);
}

double airy_scaled(double x) { return 2 * pi * std::pow(3.0, -1.0 / 3) * airy_bessel(std::pow(3.0, -1.0 / 3) * x); }

}  // namespace

TEST_SUITE("oscillatory") {

TEST_CASE("Airy reference") {
    CHECK(airy_reference(0.0) == doctest::Approx(0.3550280538878172).epsilon(1e-14));
    CHECK(airy_reference(1.0) == doctest::Approx(0.1352924163128814).epsilon(1e-13));
    CHECK(std::abs(airy_bessel(1.0) - 0.1352924163128814) <= 1e-13);
    for (double x = -20; x <= 20; x += 0.75) CHECK(std::abs(airy_reference(x) - airy_bessel(x)) <= 1e-11);
    double prev = airy_reference(1.0);
    for (double x = 1.25; x <= 20; x += 0.25) {
        const double a = airy_reference(x);
        CHECK(a < prev);
        CHECK(a > 0.0);
        prev = a;
    }
    const double h = 5e-3;
    const auto ai = [](double x) { return airy_reference(x); };
    for (double x = -5; x <= 5; x += 0.5) {
        const double d2 = (-ai(x + 2 * h) + 16 * ai(x + h) - 30 * ai(x) + 16 * ai(x - h) - ai(x - 2 * h)) / (12 * h * h);
        CHECK(std::abs(d2 - x * airy_reference(x)) <= 1e-8);
    }
}

TEST_CASE("closed forms") {
    for (double x : {-12.0, -3.3, 0.0, 1.7, 8.0}) {
        const OscResult r = osc_integral_I({3, 0, x, std::nullopt});
        CHECK(std::abs(r.value - airy_scaled(x)) <= 1e-8);
        CHECK(r.abs_error <= 1e-8);
    }
    const OscResult f = osc_integral_I({2, 0, 0, std::nullopt});
    CHECK(std::abs(f.value - std::sqrt(pi) * std::exp(std::complex<double>(0, pi / 4))) <= 1e-9);
    CHECK(std::abs(f.value) == doctest::Approx(1.7724538509055159).epsilon(1e-9));
}

TEST_CASE("realness, evenness and scaling") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(-60, 60), ua(-0.9, 1.4);
    const double bs[] = {3, 5};
    for (int i = 0; i < 20; ++i) {
        const OscResult r = osc_integral_I({bs[i % 2], ua(rng), ux(rng), std::nullopt});
        CHECK(std::abs(r.value.imag()) <= r.abs_error);
    }
    for (double b : {2.0, 3.0, 1.5, 2.5}) {
        std::uniform_real_distribution<double> ub(-0.9, std::min(1.4, b - 1.05));
        for (int i = 0; i < 5; ++i) {
            const double a = ub(rng), x = ux(rng);
            const OscResult p = osc_integral_J({b, a, x, std::nullopt}), m = osc_integral_J({b, a, -x, std::nullopt});
            CHECK(std::abs(p.value - m.value) <= 2 * std::max(p.abs_error, m.abs_error));
        }
    }
    for (double x : {-7.0, 0.5, 11.0}) {
        const OscResult j = osc_integral_J({2, 0.3, x, std::nullopt}), i = osc_integral_I({2, 0.3, x, std::nullopt});
        CHECK(std::abs(j.value - i.value) <= 2 * std::max(j.abs_error, i.abs_error));
    }
    {
        const OscResult p = osc_integral_J({3, 0, 5, std::nullopt}), m = osc_integral_J({3, 0, -5, std::nullopt});
        CHECK(std::abs(p.value - m.value) <= 2 * std::max(p.abs_error, m.abs_error));
        // the two half lines separately
        const OscResult h = half_line_integral(3, 0, 5, 1);
        const OscResult hm = half_line_integral(3, 0, -5, 1);
        CHECK(std::abs(p.value - (h.value + hm.value)) <= 1e-9);
    }
    const OscResult s1 = osc_integral_scaled({3, 0.4, 2.5, 1.0}), i1 = osc_integral_I({3, 0.4, 2.5, std::nullopt});
    CHECK(s1.value == i1.value);
    for (double t : {0.2, 3.0}) {
        const double x = -4.0;
        const OscResult s = osc_integral_scaled({3, 0, x, t});
        const double c = std::pow(3 * t, -1.0 / 3);
        CHECK(std::abs(s.value - 2 * pi * c * airy_bessel(x * c)) <= 1e-8);
    }
    const OscResult sc = osc_integral_scaled({3, 0.25, 7.0, 4.0}), di = osc_integral_direct({3, 0.25, 7.0, 4.0});
    CHECK(std::abs(sc.value - di.value) <= sc.abs_error + di.abs_error);
}

TEST_CASE("predicted exponents") {
    CHECK(predicted_exponent(3, 0, Branch::stationary) == doctest::Approx(-0.25));
    CHECK(predicted_exponent(3, -0.75, Branch::origin) == doctest::Approx(-0.25));
    for (double b : {2.0, 3.0, 4.5})
        CHECK(predicted_exponent(b, -0.5, Branch::origin) == doctest::Approx(predicted_exponent(b, -0.5, Branch::stationary)));
    CHECK(designated_branch(-0.5) == Branch::origin);
    CHECK(designated_branch(-0.49) == Branch::stationary);
    CHECK(branch_from_string(to_string(Branch::stationary)) == Branch::stationary);
}

TEST_CASE("decay slopes") {
    const std::vector<double> pts = geometric_points(100, 1e4, 9);
    const DecayFit a = fit_decay_slope(3, 0, Branch::stationary, pts);
    CHECK(a.side == -1);
    CHECK(std::abs(a.fitted_exponent + 0.25) <= 0.05);
    const DecayFit b = fit_decay_slope(3, -0.75, Branch::origin, pts);
    CHECK(b.side == 1);
    CHECK(std::abs(b.fitted_exponent + 0.25) <= 0.05);
    const DecayFit c = fit_decay_slope(2, 0.5, Branch::stationary, pts);
    CHECK(std::abs(c.fitted_exponent - 0.5) <= 0.05);
}

TEST_CASE("quadrature rules") {
    const GaussRule g = gauss_legendre(10);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 18);
    CHECK(s == doctest::Approx(2.0 / 19).epsilon(1e-14));
    // int_{-1}^{1} (1-x)^a (1+x)^b with a = -0.5, b = 0: 2^{a+1}/(a+1)
    const GaussRule j = gauss_jacobi(12, -0.5, 0.0);
    double w = 0.0;
    for (double v : j.weights) w += v;
    CHECK(w == doctest::Approx(std::pow(2.0, 0.5) / 0.5).epsilon(1e-13));
}

}
