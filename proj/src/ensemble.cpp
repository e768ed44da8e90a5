#include "sgkdv/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "sgkdv/error.hpp"
#include "sgkdv/rng.hpp"

namespace sgkdv {

void EnsemblePartial::add(std::uint64_t seed, std::vector<double> values) {
    require(!values_.contains(seed) && !errors_.contains(seed), "seed already recorded");
    values_.emplace(seed, std::move(values));
}

void EnsemblePartial::add_error(std::uint64_t seed, std::string message) {
    require(!values_.contains(seed) && !errors_.contains(seed), "seed already recorded");
    errors_.emplace(seed, std::move(message));
}

void EnsemblePartial::merge(const EnsemblePartial& other) {
    for (const auto& [s, v] : other.values_) add(s, v);
    for (const auto& [s, m] : other.errors_) add_error(s, m);
}

EnsembleStats EnsemblePartial::finalize(const std::string& estimator, const std::vector<double>& t_grid) const {
    const std::size_t m = t_grid.size();
    EnsembleStats st;
    st.estimator = estimator;
    st.t_grid = t_grid;
    st.mean.assign(m, 0.0);
    st.standard_error.assign(m, 0.0);
    st.count.assign(m, 0);
    std::vector<double> m2(m, 0.0);
    for (const auto& [seed, v] : values_) {
        require(v.size() == m, "estimator returned the wrong number of values");
        st.seeds.push_back(seed);
        for (std::size_t i = 0; i < m; ++i) {
            if (!std::isfinite(v[i])) continue;
            const double n = static_cast<double>(++st.count[i]);
            const double d = v[i] - st.mean[i];
            st.mean[i] += d / n;
            m2[i] += d * (v[i] - st.mean[i]);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double n = static_cast<double>(st.count[i]);
        st.standard_error[i] = n >= 2 ? std::sqrt(m2[i] / (n - 1.0) / n) : std::nan("");
    }
    for (const auto& [seed, msg] : errors_) st.errors.push_back({seed, msg});
    return st;
}

std::vector<std::uint64_t> ensemble_seeds(std::uint64_t base_seed, std::size_t n_paths) {
    std::vector<std::uint64_t> s(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) s[i] = derive_seed(base_seed, i);
    return s;
}

EnsemblePartial ensemble_map(const std::vector<std::uint64_t>& seeds, const Estimator& est, std::size_t nodes,
                             unsigned jobs) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size()))));
    std::vector<EnsemblePartial> parts(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&](unsigned w) {
        for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
            const std::uint64_t s = seeds[i];
            try {
                std::vector<double> v = est(s);
                if (v.size() != nodes) throw Error("estimator returned " + std::to_string(v.size()) + " values");
                parts[w].add(s, std::move(v));
            } catch (const std::exception& e) {
                parts[w].add_error(s, e.what());
            }
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    EnsemblePartial all;
    for (const auto& p : parts) all.merge(p);
    return all;
}

EnsembleStats ensemble_run(const std::string& estimator, const std::vector<double>& t_grid, const Estimator& est,
                           std::size_t n_paths, std::uint64_t base_seed, unsigned jobs) {
    require(n_paths >= 2, "ensemble needs at least two paths");
    return ensemble_map(ensemble_seeds(base_seed, n_paths), est, t_grid.size(), jobs).finalize(estimator, t_grid);
}

double log_log_slope(const std::vector<double>& t, const std::vector<double>& y) {
    require(t.size() == y.size(), "size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0 && y[i] > 0.0)) continue;
        const double a = std::log(t[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
        n += 1;
    }
    require(n >= 2, "slope needs two positive points");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace sgkdv
