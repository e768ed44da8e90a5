#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sgkdv/grid.hpp"
#include "sgkdv/noise.hpp"
#include "sgkdv/trace.hpp"

namespace sgkdv {

struct SolverConfig {
    int k = 4;
    int sign = 1;  // +1 defocusing (u^{k+1})_x on the right, -1 focusing, 0 linear
    double dt = 1e-3;
    double dealias = 2.0 / 3.0;
    GridPtr grid;

    // Largest admissible dt / dx.
    static constexpr double kCflConstant = 1.0;

    double s_k() const { return (k - 4.0) / (2.0 * k); }
    void validate() const;
};

// sign * d/dx (u^{k+1}), pseudospectral, modes above dealias * n/2 removed
// before and after the power.
Field nonlinear_term(const Field& u, int k, int sign, double dealias = 2.0 / 3.0);

// Integrating-factor RK4 on the half spectrum. Holds scratch buffers, so an
// instance must not be shared between threads.
class Integrator {
public:
    using Spectrum = std::vector<complex>;

    explicit Integrator(const SolverConfig& cfg);

    const SolverConfig& config() const { return cfg_; }
    Spectrum to_spectrum(const Field& u) const;
    Field to_field(const Spectrum& s) const;
    const Spectrum& full_step() const { return E_; }   // exp(i dt xi^3)
    const Spectrum& half_step() const { return E2_; }  // exp(i dt xi^3 / 2)

    // out = sign * i xi * P[(P u)^{k+1}]
    void nonlinear(const Spectrum& u, Spectrum& out);
    // out = sign * i xi * P[(P(b + d))^{k+1} - (P b)^{k+1}], evaluated in factored form.
    void nonlinear_difference(const Spectrum& d, const Spectrum& b, Spectrum& out);

    // One deterministic step; throws InstabilityError on blow-up.
    void step(Spectrum& u, double t);
    // u += a * phi (phi given as a spectrum).
    static void add(Spectrum& u, const Spectrum& phi, double a);

    double l2_squared(const Spectrum& u) const;
    void guard(double before, const Spectrum& after, double t) const;

private:
    void to_physical(const Spectrum& u, std::vector<double>& out, bool filter);
    void from_physical(std::vector<double>& in, Spectrum& out);

    SolverConfig cfg_;
    std::shared_ptr<const class RealFft> fft_;
    Spectrum E_, E2_, ik_;
    std::vector<double> mask_;
    Spectrum k1_, k2_, k3_, k4_, a_, tmp_, scratch_;
    std::vector<double> p1_, p2_;
};

Field step_deterministic(const Field& u, const SolverConfig& cfg);
// Deterministic step followed by the increment phi g(t) dB.
Field step_stochastic(const Field& u, const SolverConfig& cfg, const NoiseSpec& spec, double dB, double t);

double mass(const Field& u);
double energy(const Field& u, int k, int sign);

struct EnergyReport {
    double mass = 0.0;
    double energy = 0.0;
    double F1 = 0.0;     // int (2 u phi + sign u^{k+1} phi + u_x phi_x) g
    double F2 = 0.0;     // int ((k+1)/2 sign u^k phi^2 + phi^2 + phi_x^2) g^2
    double drift = 0.0;  // Ito drift of M + E: g^2 (|phi|^2 + |phi_x|^2 / 2 + (k+1)/2 sign int u^k phi^2)
};

EnergyReport ito_drift(const Field& u, const NoiseSpec& spec, double t, int k, int sign = 1);

// Q_c(x - x0), Q_c(x) = c^{1/k} Q(sqrt(c) x), Q = ((k+2)/2)^{1/k} sech^{2/k}(k x / 2).
Field soliton(int k, double c, double x0, const GridPtr& grid, int sign = -1);
// max |Q'' - Q + Q^{k+1}| on a fine periodic grid; soliton() requires <= 1e-10.
double soliton_residual(int k);

struct SimulationResult {
    SpaceTimeTrace trace;  // every `stride` steps
    std::vector<double> mass;
    std::vector<double> energy;
};

struct SimulationRequest {
    std::size_t steps = 0;
    std::size_t stride = 1;
    double t0 = 0.0;
    const NoiseSpec* noise = nullptr;   // optional forcing
    const BrownianPath* path = nullptr; // increments for steps starting at node t0
};

SimulationResult simulate(const Field& u0, const SolverConfig& cfg, const SimulationRequest& req);

}  // namespace sgkdv
