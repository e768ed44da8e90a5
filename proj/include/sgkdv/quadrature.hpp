#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace sgkdv {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes and weights for the weight (1 - x)^a (1 + x)^b on [-1, 1], a, b > -1.
GaussRule gauss_jacobi(int n, double a, double b);
GaussRule gauss_legendre(int n);

// Integrand sample: value and the magnitude of the phase it was computed
// from, used to estimate floating-point roundoff.
struct QuadSample {
    std::complex<double> value;
    double phase_scale = 0.0;
};

using Integrand = std::function<QuadSample(double)>;

struct QuadResult {
    std::complex<double> value;
    double error = 0.0;     // discretization estimate
    double roundoff = 0.0;  // floating-point estimate
    std::size_t evaluations = 0;
    bool converged = true;
};

// One 21-point Gauss-Kronrod panel; error is |K21 - G10|.
QuadResult gauss_kronrod21(const Integrand& f, double a, double b);

// Globally adaptive bisection over the panels given by `breakpoints`.
QuadResult integrate_adaptive(const Integrand& f, const std::vector<double>& breakpoints,
                              double abs_tol, std::size_t max_evaluations);

// int_0^h u^alpha F(u) du with Gauss-Jacobi nodes; error from comparing two orders.
QuadResult integrate_jacobi(const Integrand& F, double alpha, double h);

}  // namespace sgkdv
