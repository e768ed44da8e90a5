#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sgkdv/error.hpp"
#include "sgkdv/io.hpp"
#include "sgkdv/spectral.hpp"
#include "sgkdv/trace.hpp"

using namespace sgkdv;
using std::numbers::pi;

namespace {

Field gaussian(const GridPtr& g, double a = 1.0) {
    return Field::sample(g, [a](double x) { return std::exp(-a * x * x); });
}

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

// u(t, x) on the real line for u0 = exp(-x^2): (1/pi) int_0^inf cos(x xi + t xi^3) sqrt(pi) exp(-xi^2/4) dxi.
double airy_gaussian_line(double t, double x) {
    const double h = 2e-4, top = 16.0;
    double s = 0.5 * std::sqrt(pi) * std::cos(0.0);
    for (int i = 1; i * h <= top; ++i) {
        const double k = i * h;
        s += std::sqrt(pi) * std::exp(-k * k / 4.0) * std::cos(x * k + t * k * k * k);
    }
    return s * h / pi;
}

SpaceTimeTrace random_trace(std::mt19937_64& rng, const GridPtr& g, std::size_t steps) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpaceTimeTrace tr(g, 0.0, 0.1, steps);
    for (double& v : tr.data()) v = u(rng);
    return tr;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid frequencies and preconditions") {
    const GridPtr g = make_grid(8, 2 * pi);
    std::vector<double> xi = g->frequencies();
    std::sort(xi.begin(), xi.end());
    for (int m = -4; m <= 3; ++m) CHECK(xi[m + 4] == doctest::Approx(m).epsilon(1e-15));

    const GridPtr h = make_grid(16, pi);
    CHECK(h->spacing() == doctest::Approx(pi / 16).epsilon(1e-15));
    CHECK(h->frequency(1) - h->frequency(0) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(make_grid(7, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(8, 0.0), InvalidArgument);
}

TEST_CASE("transform round trip and Plancherel") {
    const GridPtr g = make_grid(128, 20.0);
    const Field f = Field::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + std::sin(3 * x)) + 0.1 * std::cos(x); });
    const SpectralField s = forward_transform(f);
    const Field back = inverse_transform(s);
    double norm = 0.0;
    for (double v : f.values) norm = std::max(norm, std::abs(v));
    CHECK(max_abs_diff(f, back) <= 1e-12 * norm);

    double lhs = 0.0, rhs = 0.0;
    for (double v : f.values) lhs += v * v * g->spacing();
    for (const auto& c : s.coefficients) rhs += std::norm(c);
    rhs /= g->length();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);

    // Hermitian symmetry: coefficient of -xi is the conjugate of that of xi.
    for (std::size_t j = 1; j < g->n() / 2; ++j)
        CHECK(std::abs(s.coefficients[j] - std::conj(s.coefficients[g->n() - j])) <= 1e-12 * lhs);
}

TEST_CASE("fractional derivatives") {
    const GridPtr g = make_grid(64, 2 * pi);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    CHECK(max_abs_diff(fractional_derivative(s, 0.0, DerivativeKind::homogeneous), s) <= 1e-14);

    const Field one = Field::sample(g, [](double) { return 1.0; });
    CHECK(max_abs_diff(fractional_derivative(one, 0.7, DerivativeKind::inhomogeneous), one) <= 1e-13);
    CHECK(max_abs_diff(fractional_derivative(one, -1.3, DerivativeKind::inhomogeneous), one) <= 1e-13);

    // |D|^1 |D|^1 sin = -d^2/dx^2 sin = sin
    const Field d1 = fractional_derivative(s, 1.0, DerivativeKind::homogeneous);
    const Field d2 = fractional_derivative(d1, 1.0, DerivativeKind::homogeneous);
    CHECK(max_abs_diff(d2, s) <= 1e-12);
    const Field second = derivative(s, 2);
    CHECK(max_abs_diff(second, -1.0 * s) <= 1e-12);
    const Field cosine = Field::sample(g, [](double x) { return std::cos(x); });
    CHECK(max_abs_diff(derivative(s, 1), cosine) <= 1e-13);

    // negative homogeneous order needs a vanishing mean
    CHECK_THROWS(fractional_derivative(one, -0.5, DerivativeKind::homogeneous));
    const Field zeroed = fractional_derivative(one, -0.5, DerivativeKind::homogeneous, ZeroMode::zero_out);
    CHECK(max_abs_diff(zeroed, Field(g)) <= 1e-14);
    CHECK_THROWS(fractional_derivative(s, std::nan(""), DerivativeKind::inhomogeneous));
}

TEST_CASE("Airy propagator") {
    const GridPtr g = make_grid(1024, 80.0);
    const Field u0 = gaussian(g);
    CHECK(max_abs_diff(airy_propagate(u0, 0.0), u0) <= 1e-15);
    for (double t : {0.3, -2.0, 17.5}) CHECK(std::abs(l2_norm(airy_propagate(u0, t)) - l2_norm(u0)) <= 1e-12 * l2_norm(u0));

    const Field ut = airy_propagate(u0, 0.5);
    double worst = 0.0;
    for (std::size_t j = 512 - 40; j <= 512 + 40; j += 9) {
        const double x = g->point(j);
        double ref = 0.0;
        for (int img = -3; img <= 3; ++img) ref += airy_gaussian_line(0.5, x + 80.0 * img);
        worst = std::max(worst, std::abs(ut[j] - ref));
    }
    CHECK(worst <= 1e-8);

    const Field a = airy_propagate(airy_propagate(u0, 0.7), 1.1);
    const Field b = airy_propagate(u0, 1.8);
    CHECK(max_abs_diff(a, b) <= 1e-12);

    const Field f = Field::sample(g, [](double x) { return x * std::exp(-x * x); });
    const Field c1 = fractional_derivative(airy_propagate(f, 0.9), 0.6, DerivativeKind::homogeneous);
    const Field c2 = airy_propagate(fractional_derivative(f, 0.6, DerivativeKind::homogeneous), 0.9);
    CHECK(max_abs_diff(c1, c2) <= 1e-13);
}

TEST_CASE("Sobolev norms") {
    const GridPtr g = make_grid(64, 2 * pi);
    CHECK(sobolev_norm(Field(g), 1.0) == 0.0);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    CHECK(std::abs(sobolev_norm(s, 0.0) - l2_norm(s)) <= 1e-12 * l2_norm(s));
    CHECK(sobolev_norm(s, 1.0) / sobolev_norm(s, 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(l2_norm(s) == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
}

TEST_CASE("mixed norms") {
    const GridPtr g = make_grid(16, 3.0);
    SpaceTimeTrace c(g, 0.0, 0.25, 8);
    for (double& v : c.data()) v = -1.5;
    const double T = 2.0, L = 3.0;
    for (auto [p, q] : {std::pair<double, double>{2, 2}, {5, 10}, {3, 1.5}}) {
        CHECK(mixed_norm_xt(c, p, q) == doctest::Approx(1.5 * std::pow(L, 1 / p) * std::pow(T, 1 / q)).epsilon(1e-12));
        CHECK(mixed_norm_tx(c, q, p) == doctest::Approx(1.5 * std::pow(L, 1 / p) * std::pow(T, 1 / q)).epsilon(1e-12));
    }
    CHECK(mixed_norm_xt(c, kInf, kInf) == doctest::Approx(1.5));

    std::mt19937_64 rng(5);
    SpaceTimeTrace one = random_trace(rng, g, 0);
    CHECK(mixed_norm_xt(one, 4.0, kInf) == doctest::Approx(lp_norm(one.field(0), 4.0)).epsilon(1e-13));

    // Fubini: flattened space-time sum with trapezoid weights in t
    SpaceTimeTrace r = random_trace(rng, g, 9);
    double flat = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = (i == 0 || i == r.steps()) ? 0.5 : 1.0;
        for (double v : r.snapshot(i)) flat += w * v * v * r.dt() * g->spacing();
    }
    CHECK(mixed_norm_xt(r, 2.0, 2.0) == doctest::Approx(std::sqrt(flat)).epsilon(1e-10));
    CHECK(mixed_norm_tx(r, 2.0, 2.0) == doctest::Approx(mixed_norm_xt(r, 2.0, 2.0)).epsilon(1e-12));

    // Minkowski for p >= q
    const std::pair<double, double> pq[] = {{5, 2}, {10, 5}, {4, 4}, {8, 1}, {6, 3}};
    for (int i = 0; i < 50; ++i) {
        const SpaceTimeTrace t = random_trace(rng, g, 3 + static_cast<std::size_t>(i % 7));
        const auto [p, q] = pq[i % 5];
        CHECK(mixed_norm_xt(t, p, q) <= mixed_norm_tx(t, q, p) * (1 + 1e-9));
    }
    CHECK_THROWS(mixed_norm_xt(c, 0.5, 2.0));
}

TEST_CASE("CSV doubles round trip") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::stod(format_double(v)) == v);
    }
}

}
