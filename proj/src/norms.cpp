#include <algorithm>
#include <cmath>

#include "sgkdv/error.hpp"
#include "sgkdv/trace.hpp"

namespace sgkdv {

SpaceTimeTrace::SpaceTimeTrace(GridPtr grid, double t0, double dt, std::size_t steps)
    : grid_(std::move(grid)), t0_(t0), dt_(dt), steps_(steps) {
    require(grid_ != nullptr, "trace needs a grid");
    require(std::isfinite(t0) && std::isfinite(dt), "trace times must be finite");
    require(steps == 0 || dt > 0.0, "trace time step must be positive");
    data_.assign((steps + 1) * grid_->n(), 0.0);
}

SpaceTimeTrace SpaceTimeTrace::from_fields(const std::vector<double>& times,
                                           const std::vector<Field>& fields) {
    require(!times.empty() && times.size() == fields.size(), "times and fields must match in length");
    const std::size_t m = times.size() - 1;
    const double dt = m == 0 ? 0.0 : (times.back() - times.front()) / static_cast<double>(m);
    for (std::size_t i = 1; i <= m; ++i) {
        const double expected = times.front() + static_cast<double>(i) * dt;
        require(times[i] > times[i - 1], "trace times must increase strictly");
        require(std::abs(times[i] - expected) <= 1e-12 * std::max(std::abs(expected), std::abs(dt)),
                "trace times must be uniform");
    }
    SpaceTimeTrace tr(fields.front().grid, times.front(), dt, m);
    for (std::size_t i = 0; i <= m; ++i) tr.set(i, fields[i]);
    return tr;
}

std::vector<double> SpaceTimeTrace::times() const {
    std::vector<double> t(size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
    return t;
}

std::span<const double> SpaceTimeTrace::snapshot(std::size_t i) const {
    require(i <= steps_, "snapshot index out of range");
    return {data_.data() + i * grid_->n(), grid_->n()};
}

std::span<double> SpaceTimeTrace::snapshot(std::size_t i) {
    require(i <= steps_, "snapshot index out of range");
    return {data_.data() + i * grid_->n(), grid_->n()};
}

Field SpaceTimeTrace::field(std::size_t i) const {
    auto s = snapshot(i);
    return Field(grid_, std::vector<double>(s.begin(), s.end()));
}

void SpaceTimeTrace::set(std::size_t i, const Field& f) {
    require(same_grid(grid_, f.grid), "snapshot grid differs from trace grid");
    auto s = snapshot(i);
    std::copy(f.values.begin(), f.values.end(), s.begin());
}

SpaceTimeTrace SpaceTimeTrace::window(std::size_t first, std::size_t last) const {
    require(first <= last && last <= steps_, "invalid trace window");
    SpaceTimeTrace out(grid_, time(first), dt_, last - first);
    const std::size_t n = grid_->n();
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * n),
              data_.begin() + static_cast<std::ptrdiff_t>((last + 1) * n), out.data_.begin());
    return out;
}

bool aligned(const SpaceTimeTrace& a, const SpaceTimeTrace& b) {
    if (!same_grid(a.grid(), b.grid()) || a.steps() != b.steps()) return false;
    const double scale = std::max({std::abs(a.t0()), std::abs(a.horizon()), 1e-300});
    return std::abs(a.t0() - b.t0()) <= 1e-12 * scale && std::abs(a.dt() - b.dt()) <= 1e-12 * scale;
}

namespace {

void check_exponent(const Exponent& e) {
    require(e.is_infinite() || e.value() >= 1.0, "Lebesgue exponents must be >= 1");
}

double trace_max(const SpaceTimeTrace& tr) {
    double mx = 0.0;
    for (double v : tr.data()) mx = std::max(mx, std::abs(v));
    return mx;
}

// Weighted l^r reduction of nonnegative values already scaled to [0, 1].
struct Reducer {
    Exponent r;
    double acc = 0.0;
    void add(double v, double w) {
        if (r.is_infinite())
            acc = std::max(acc, v);
        else
            acc += w * std::pow(v, r.value());
    }
    double result() const { return r.is_infinite() ? acc : std::pow(acc, 1.0 / r.value()); }
};

double time_weight(const SpaceTimeTrace& tr, std::size_t i) {
    if (tr.steps() == 0) return 0.0;
    return (i == 0 || i == tr.steps()) ? 0.5 * tr.dt() : tr.dt();
}

}  // namespace

double mixed_norm_xt(const SpaceTimeTrace& tr, Exponent p, Exponent q) {
    check_exponent(p);
    check_exponent(q);
    const double mx = trace_max(tr);
    if (mx == 0.0) return 0.0;
    const std::size_t n = tr.grid()->n();
    const double dx = tr.grid()->spacing();
    Reducer outer{p};
    for (std::size_t j = 0; j < n; ++j) {
        Reducer in{q};
        for (std::size_t i = 0; i < tr.size(); ++i)
            in.add(std::abs(tr.data()[i * n + j]) / mx, time_weight(tr, i));
        outer.add(in.result(), dx);
    }
    return mx * outer.result();
}

double mixed_norm_tx(const SpaceTimeTrace& tr, Exponent q, Exponent p) {
    check_exponent(p);
    check_exponent(q);
    const double mx = trace_max(tr);
    if (mx == 0.0) return 0.0;
    const std::size_t n = tr.grid()->n();
    const double dx = tr.grid()->spacing();
    Reducer outer{q};
    for (std::size_t i = 0; i < tr.size(); ++i) {
        Reducer in{p};
        for (std::size_t j = 0; j < n; ++j) in.add(std::abs(tr.data()[i * n + j]) / mx, dx);
        outer.add(in.result(), time_weight(tr, i));
    }
    return mx * outer.result();
}

}  // namespace sgkdv
