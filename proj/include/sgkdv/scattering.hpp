#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgkdv/noise.hpp"
#include "sgkdv/solver.hpp"
#include "sgkdv/trace.hpp"

namespace sgkdv {

enum class PullbackSpace { L2, H1 };

// u_* = u - z_* snapshot by snapshot.
SpaceTimeTrace decompose(const SpaceTimeTrace& u, const SpaceTimeTrace& zstar);

// L^5_x L^10_t for k = 4, L^{5k/4}_x L^{5k/2}_t for k > 4.
double scattering_size(const SpaceTimeTrace& tr, int k);

struct VNorms {
    double lambda1 = 0.0;     // |<d_x> v|_{L^5_x L^10_t}
    double lambda2 = 0.0;     // |v|_{L^{5k/4}_x L^{5k/2}_t}
    double d2_sup_x = 0.0;    // |d_x^2 v|_{C^0_x L^2_t}
    double h1_sup_t = 0.0;    // |v|_{C^0_t H^1_x}
};

VNorms v_norms(const SpaceTimeTrace& v, int k);

struct ScatteringReport {
    std::vector<double> t_checkpoints;
    std::vector<double> cauchy_increments;  // |V(-t_{i+1}) u(t_{i+1}) - V(-t_i) u(t_i)|
    double scattering_size = 0.0;
    std::optional<VNorms> v_norms;
    Field u_plus;                           // V(-t_last) u(t_last)
};

ScatteringReport scattering_diagnostic(const SpaceTimeTrace& u, const std::vector<double>& checkpoints,
                                       PullbackSpace space, int k, const SpaceTimeTrace* v = nullptr);

struct VSolution {
    SpaceTimeTrace v;        // difference form
    SpaceTimeTrace v_naive;  // u_* - y from separately evolved states
    SpaceTimeTrace y;
    SpaceTimeTrace zstar;
};

// Co-evolves y (deterministic, y(T) = y_init), z_* (minus the tail of the
// stochastic convolution, step-end aligned) and v = u_* - y with v(T) = 0 on
// [T, horizon]. The path must have uniform steps of cfg.dt on [T, horizon]
// and continue far enough for the tail.
VSolution solve_v(const Field& y_init, const NoiseSpec& spec, const BrownianPath& path, double T, double horizon,
                  const SolverConfig& cfg, std::size_t stride = 1);

struct ScatterConfig {
    SolverConfig solver;
    Field u0;
    NoiseSpec noise;
    double horizon = 40.0;
    std::vector<double> checkpoints{10.0, 20.0, 40.0};
    std::vector<double> v_starts{5.0, 10.0, 20.0};
    std::size_t stride = 1;
    double tail_ratio = 2e-3;  // graded step ratio beyond the horizon
    double small_data = 0.1;   // |u0|_2 bound for k = 4
};

struct ScatterPathResult {
    std::uint64_t seed = 0;
    ScatteringReport report;
    std::vector<double> v_size;          // scattering_size of v on [T, horizon) per start T
    std::vector<VNorms> v_norm_series;   // per start T
    double v_naive_gap = 0.0;            // max |v - v_naive|_2 over starts and snapshots
    double tail_residual = 0.0;          // |phi|_2^2 int_horizon^inf g^2
};

void validate(const ScatterConfig& cfg);
ScatterPathResult scatter_path(const ScatterConfig& cfg, std::uint64_t seed);

// Increments strictly decrease along the checkpoints.
bool increments_decrease(const std::vector<double>& inc);
// Nonincreasing sequence.
bool nonincreasing(const std::vector<double>& v);

}  // namespace sgkdv
