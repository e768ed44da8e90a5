#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sgkdv/exponent.hpp"
#include "sgkdv/grid.hpp"
#include "sgkdv/trace.hpp"

namespace sgkdv {

struct KatoTriple {
    Exponent p = 5.0;
    Exponent q = 10.0;
    double alpha = 0.0;
};

struct StrichartzPair {
    Exponent p = 2.0;
    Exponent q = kInf;
    double beta = 0.0;
};

struct Admissibility {
    bool ok = false;
    std::string diagnostic;
    explicit operator bool() const { return ok; }
};

// 2/p = 1/2 - 1/q, alpha = 2/q - 1/p, (p, q, alpha) in [4, inf] x [2, inf] x [-1/4, 1].
Admissibility validate_kato(Exponent p, Exponent q, double alpha);
inline Admissibility validate_kato(const KatoTriple& t) { return validate_kato(t.p, t.q, t.alpha); }
// 1/q = (beta + 1)/3 (1/2 - 1/p), p in [2, inf], beta in [0, 1/2].
Admissibility validate_strichartz(Exponent p, Exponent q, double beta);
inline Admissibility validate_strichartz(const StrichartzPair& s) { return validate_strichartz(s.p, s.q, s.beta); }

// The p < q branch (5/(1 - alpha), 10/(4 alpha + 1), alpha), alpha in [-1/4, 1/6).
KatoTriple kato_family_for_pq_order(double alpha);
// q from the Strichartz relation.
StrichartzPair strichartz_pair(Exponent p, double beta);

// 1/p_k = 2/(5k) + 1/10, 1/q_k = 3/10 - 4/(5k).
std::array<Exponent, 2> beta_exponents(int k);

struct TimeWindow {
    double taper = 0.1;  // cosine ramp on each end, as a fraction of the trace length
};

// |omega|^sigma applied along t to the tapered trace (periodic extension of the window).
SpaceTimeTrace time_fractional_derivative(const SpaceTimeTrace& tr, double sigma, const TimeWindow& w = {});

struct BetaValues {
    double alpha1 = 0.0;  // sup_t |D^{s_k} z|_2
    double alpha2 = 0.0;  // |D^{1+s_k} z|_{L^inf_x L^2_t}
    double alpha3 = 0.0;  // |D^{s_k} z|_{L^5_x L^10_t}
    double alpha4 = 0.0;  // |D_x^{1/10-2/(5k)} D_t^{3/10-6/(5k)} z|_{L^{p_k}_x L^{q_k}_t}
};

// Functionals over the snapshots with t <= T (at least 16 of them).
BetaValues beta_functionals(const SpaceTimeTrace& z, int k, double T, const TimeWindow& w = {});

struct ProbeConfig {
    std::size_t n = 256;
    double L = 64.0;
    double horizon = 2.0;       // t in [-horizon, horizon]
    std::size_t time_samples = 400;
    ProbeConfig refined() const;  // 4n, 2L, 2 horizon, 4 time_samples: halves dx and dt, doubles extent
};

struct ProbeDatum {
    double center = 0.0;
    double width = 1.0;
    double frequency = 0.0;
    double phase = 0.0;
    Field sample(const GridPtr& grid) const;
};

// Modulated Gaussians with random center, width, modulation and phase.
std::vector<ProbeDatum> probe_data(std::uint64_t seed, std::size_t count);

struct ProbeResult {
    double ratio = 0.0;          // max over data of norm / |u0|_2
    double refined_ratio = 0.0;
    double relative_change = 0.0;
    std::vector<double> ratios;  // per datum, base configuration
    bool stable(double tol = 0.05) const { return relative_change < tol; }
};

// |D^alpha V(t) u0|_{L^p_x L^q_t} / |u0|_2.
double kato_ratio(const KatoTriple& t, const Field& u0, double horizon, std::size_t time_samples);
// |D^{beta/2 (1 - 2/p)} V(t) u0|_{L^q_t L^p_x} / |u0|_2.
double strichartz_ratio(const StrichartzPair& s, const Field& u0, double horizon, std::size_t time_samples);

ProbeResult kato_constant_probe(const KatoTriple& t, const std::vector<ProbeDatum>& data, const ProbeConfig& cfg);
ProbeResult strichartz_constant_probe(const StrichartzPair& s, const std::vector<ProbeDatum>& data,
                                      const ProbeConfig& cfg);

}  // namespace sgkdv
