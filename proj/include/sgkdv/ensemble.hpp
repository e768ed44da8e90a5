#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace sgkdv {

struct SeedError {
    std::uint64_t seed = 0;
    std::string message;
};

struct EnsembleStats {
    std::string estimator;
    std::vector<double> t_grid;
    std::vector<double> mean;
    std::vector<double> standard_error;  // sample std / sqrt(n)
    std::vector<std::size_t> count;
    std::vector<std::uint64_t> seeds;    // seeds that contributed, ascending
    std::vector<SeedError> errors;
};

// Values of one estimator at every t-node for the path drawn from `seed`.
using Estimator = std::function<std::vector<double>(std::uint64_t seed)>;

// Per-seed results. Merging is a union, so the merged statistics do not depend
// on how members were split between workers or in which order they finished.
class EnsemblePartial {
public:
    void add(std::uint64_t seed, std::vector<double> values);
    void add_error(std::uint64_t seed, std::string message);
    void merge(const EnsemblePartial& other);
    std::size_t size() const { return values_.size(); }
    const std::map<std::uint64_t, std::vector<double>>& values() const { return values_; }
    const std::map<std::uint64_t, std::string>& errors() const { return errors_; }
    // Moments accumulated in ascending seed order.
    EnsembleStats finalize(const std::string& estimator, const std::vector<double>& t_grid) const;

private:
    std::map<std::uint64_t, std::vector<double>> values_;
    std::map<std::uint64_t, std::string> errors_;
};

std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base_seed, std::size_t n_paths);

// Evaluates `est` on every seed with `jobs` worker threads. Exceptions become
// per-seed error records.
EnsemblePartial ensemble_map(const std::vector<std::uint64_t>& seeds, const Estimator& est, std::size_t nodes,
                             unsigned jobs = 1);

EnsembleStats ensemble_run(const std::string& estimator, const std::vector<double>& t_grid, const Estimator& est,
                           std::size_t n_paths, std::uint64_t base_seed, unsigned jobs = 1);

// Least-squares slope of log(mean) against log(t) over nodes with positive mean.
double log_log_slope(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace sgkdv
