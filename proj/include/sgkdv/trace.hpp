#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sgkdv/exponent.hpp"
#include "sgkdv/grid.hpp"

namespace sgkdv {

// Fields on a uniform time grid t_i = t0 + i dt, i = 0..steps(). Snapshots are
// stored contiguously, snapshot-major.
class SpaceTimeTrace {
public:
    SpaceTimeTrace() = default;
    SpaceTimeTrace(GridPtr grid, double t0, double dt, std::size_t steps);
    static SpaceTimeTrace from_fields(const std::vector<double>& times, const std::vector<Field>& fields);

    const GridPtr& grid() const { return grid_; }
    double t0() const { return t0_; }
    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    std::size_t size() const { return steps_ + 1; }
    double time(std::size_t i) const { return t0_ + static_cast<double>(i) * dt_; }
    std::vector<double> times() const;
    double horizon() const { return time(steps_); }

    std::span<const double> snapshot(std::size_t i) const;
    std::span<double> snapshot(std::size_t i);
    Field field(std::size_t i) const;
    void set(std::size_t i, const Field& f);

    // Snapshots first..last inclusive.
    SpaceTimeTrace window(std::size_t first, std::size_t last) const;
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    GridPtr grid_;
    double t0_ = 0.0;
    double dt_ = 0.0;
    std::size_t steps_ = 0;
    std::vector<double> data_;
};

bool aligned(const SpaceTimeTrace& a, const SpaceTimeTrace& b);

// (int (int |f|^q dt)^{p/q} dx)^{1/p}; trapezoid in t, Riemann sum in x.
double mixed_norm_xt(const SpaceTimeTrace& tr, Exponent p, Exponent q);
// (int (int |f|^p dx)^{q/p} dt)^{1/q}.
double mixed_norm_tx(const SpaceTimeTrace& tr, Exponent q, Exponent p);

}  // namespace sgkdv
