#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgkdv/grid.hpp"
#include "sgkdv/noise.hpp"
#include "sgkdv/solver.hpp"

namespace sgkdv {

inline constexpr int kSchemaVersion = 1;

struct GridSpec {
    std::size_t n = 512;
    double L = 60.0;
    bool operator==(const GridSpec&) const = default;
};

// gaussian: A exp(-(x-c)^2 / (2 w^2)) cos(f (x-c)); sech: A sech((x-c)/w);
// soliton: Q_c(x - c) with speed A (focusing only); zero.
struct ProfileSpec {
    std::string profile = "gaussian";
    double amplitude = 1.0;
    double width = 1.0;
    double center = 0.0;
    double frequency = 0.0;
    std::optional<double> l2_norm;  // rescale to this L^2 norm when set
    bool operator==(const ProfileSpec&) const = default;
};

struct SolverSpec {
    int k = 4;
    int sign = 1;
    double dt = 1e-3;
    double dealias = 2.0 / 3.0;
    double horizon = 1.0;
    std::size_t stride = 1;
    bool operator==(const SolverSpec&) const = default;
};

struct NoiseManifest {
    ProfileSpec phi{"gaussian", 1.0, 1.0, 0.0, 0.0, std::nullopt};
    std::string envelope = "zero";  // zero | power | constant
    double gamma = 0.7;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
    bool operator==(const NoiseManifest&) const = default;
};

struct OscintSpec {
    double b = 3.0;
    std::vector<double> alphas{0.0};
    double x_min = 100.0;
    double x_max = 1e4;
    int points = 15;
    int check_points = 101;
    bool operator==(const OscintSpec&) const = default;
};

struct ProbeSpec {
    std::string p = "5";
    std::string q = "10";
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t data = 100;
    std::uint64_t data_seed = 1;
    std::size_t n = 256;
    double L = 64.0;
    double horizon = 2.0;
    std::size_t time_samples = 400;
    bool operator==(const ProbeSpec&) const = default;
};

struct EnsembleSpec {
    std::size_t paths = 100;
    std::vector<double> t_grid{1.0};
    std::size_t shard_index = 0;
    std::size_t shard_count = 1;
    bool operator==(const EnsembleSpec&) const = default;
};

struct BetaSpec {
    std::vector<double> T{1.0, 2.0, 4.0, 8.0};
    bool operator==(const BetaSpec&) const = default;
};

struct ScatterSpec {
    std::size_t paths = 20;
    std::vector<double> checkpoints{10.0, 20.0, 40.0};
    std::vector<double> v_starts{5.0, 10.0, 20.0};
    double small_data = 0.1;
    double tail_ratio = 2e-3;
    double pass_fraction = 0.9;
    double final_increment = 1e-3;
    bool operator==(const ScatterSpec&) const = default;
};

struct Manifest {
    int schema_version = kSchemaVersion;
    std::string experiment = "simulate";
    GridSpec grid;
    SolverSpec solver;
    ProfileSpec initial;
    NoiseManifest noise;
    std::vector<std::string> estimators;
    OscintSpec oscint;
    ProbeSpec probe;
    EnsembleSpec ensemble;
    BetaSpec beta;
    ScatterSpec scatter;
    std::string trace_format = "csv";  // csv | binary | none
    std::string output = "out";
    bool operator==(const Manifest&) const = default;
};

struct ParseOutcome {
    std::optional<Manifest> manifest;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return manifest.has_value(); }
};

// Strict parse: unknown keys, type mismatches and constraint violations are
// all collected; the manifest is returned only when there are none.
ParseOutcome parse_manifest(const std::string& text);
// Resolved manifest with every field written out.
std::string serialize_manifest(const Manifest& m);

// Constraint checks on an already typed manifest (used by parse_manifest).
void check_manifest(const Manifest& m, std::vector<std::string>& errors, std::vector<std::string>& warnings);

const std::vector<std::string>& known_experiments();
const std::vector<std::string>& known_estimators();
bool is_energy_estimator(const std::string& name);

// Builders from the manifest.
GridPtr build_grid(const Manifest& m);
SolverConfig build_solver(const Manifest& m, const GridPtr& grid);
Field build_profile(const ProfileSpec& p, const GridPtr& grid);
NoiseSpec build_noise(const Manifest& m, const GridPtr& grid);

}  // namespace sgkdv
