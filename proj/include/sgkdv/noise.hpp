#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgkdv/grid.hpp"
#include "sgkdv/trace.hpp"

namespace sgkdv {

// Deterministic envelope g(t) of the forcing dW = g(t) phi(x) dB.
class Envelope {
public:
    enum class Kind { power, constant, zero, custom };

    static Envelope power(double gamma, double amplitude = 1.0);  // amplitude (1 + t)^-gamma
    static Envelope constant(double value);
    static Envelope zero();
    // Hook for other deterministic envelopes; tail_mass may be empty when unknown.
    static Envelope custom(std::function<double(double)> g, std::function<double(double)> tail_mass = {});

    Kind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double amplitude() const { return amplitude_; }
    double operator()(double t) const;
    // int_a^b g^2 dt (closed form where available).
    double mass(double a, double b) const;
    // int_t^inf g^2 dt; +inf when it diverges.
    double tail_mass(double t) const;

private:
    Kind kind_ = Kind::zero;
    double gamma_ = 0.0;
    double amplitude_ = 0.0;
    std::function<double(double)> g_;
    std::function<double(double)> tail_;
};

struct NoiseSpec {
    Field phi;
    Envelope envelope;
    std::uint64_t seed = 0;

    double gamma() const { return envelope.gamma(); }
};

// Sampled Brownian increments on the nodes times[0] < times[1] < ...
struct BrownianPath {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> times;
    std::vector<double> increments;  // increments[i] = B(times[i+1]) - B(times[i])

    std::size_t steps() const { return increments.size(); }
    bool uniform() const;
    double dt() const;  // uniform step; throws for nonuniform paths
    // Index of the node equal to t (relative tolerance 1e-12); throws if absent.
    std::size_t node(double t) const;
};

BrownianPath sample_path(std::uint64_t seed, double dt, std::size_t m, double t0 = 0.0, std::uint64_t stream = 0);
BrownianPath sample_path_on(std::uint64_t seed, std::vector<double> times, std::uint64_t stream = 0);

// Nodes t_{k+1} = t_k + ratio (1 + t_k), clipped to hit `end` and every value in `stops`.
std::vector<double> graded_times(double start, double end, double ratio, const std::vector<double>& stops = {});
// Uniform nodes t0 + i dt, i = 0..m, continued by graded nodes up to far_end.
std::vector<double> uniform_then_graded(double t0, double dt, std::size_t m, double far_end, double ratio);

// z_{n+1} = V(dt)(z_n + phi g(t_n) dB_n), z_0 = 0; snapshot every `stride` steps.
SpaceTimeTrace stochastic_convolution(const NoiseSpec& spec, const BrownianPath& path, std::size_t stride = 1);
// ||z(t_n)||_2^2 at the requested step indices, without forming fields.
std::vector<double> convolution_norms(const NoiseSpec& spec, const BrownianPath& path,
                                      const std::vector<std::size_t>& steps);

enum class TailAlignment {
    left_point,  // V(t - t_m) phi g(t_m) dB_m
    step_end     // V(t - t_{m+1}) phi g(t_m) dB_m, the solver's splitting
};

constexpr double kTailMassRule = 1e-4;

// Smallest horizon with int_H^inf g^2 <= rule * int_t^inf g^2 (power envelopes).
double tail_horizon(const Envelope& env, double t, double rule = kTailMassRule);
void check_tail_horizon(const Envelope& env, double t, double horizon, double rule = kTailMassRule);

// z_*(t) = int_t^horizon V(t - s) phi g dB over the path nodes in [t, horizon].
Field tail_convolution(const NoiseSpec& spec, const BrownianPath& path, double t, double horizon,
                       TailAlignment alignment = TailAlignment::left_point);

// z_* on the uniform part of the path from node `first` to `last` (inclusive),
// including the contribution of every later node of the path.
SpaceTimeTrace tail_trace(const NoiseSpec& spec, const BrownianPath& path, std::size_t first, std::size_t last,
                          TailAlignment alignment = TailAlignment::left_point, std::size_t stride = 1);

struct TailDecayOptions {
    double ratio = 2e-3;  // graded step relative to 1 + t
    std::size_t batches = 10;
    double mode_cutoff = 1e-14;  // modes with |phi_hat| below this fraction of the max are skipped
    std::uint64_t stream = 0;
};

struct TailDecayFit {
    std::vector<double> t;
    std::vector<double> mean;       // sample mean of ||z_*(t)||^2
    std::vector<double> standard_error;
    std::vector<double> expected;   // closed form for power envelopes, NaN otherwise
    double horizon = 0.0;
    double slope = 0.0;             // least squares slope of log mean vs log(1 + t)
    double slope_stderr = 0.0;      // spread of per-batch slopes
    double ci_low = 0.0, ci_high = 0.0;
    std::size_t paths = 0;
};

TailDecayFit tail_decay_probe(const NoiseSpec& spec, const std::vector<double>& t_grid, std::size_t n_paths,
                              const TailDecayOptions& opt = {});

// Paths as raw little-endian doubles plus a JSON sidecar.
std::string path_to_binary(const BrownianPath& p);
std::string path_sidecar_json(const BrownianPath& p);

}  // namespace sgkdv
