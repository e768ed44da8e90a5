#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgkdv/error.hpp"
#include "sgkdv/estimates.hpp"
#include "sgkdv/fft.hpp"
#include "sgkdv/rng.hpp"
#include "sgkdv/spectral.hpp"

namespace sgkdv {

namespace {

template <class Fn>
SpaceTimeTrace map_snapshots(const SpaceTimeTrace& tr, Fn&& fn) {
    SpaceTimeTrace out(tr.grid(), tr.t0(), tr.dt(), tr.steps());
    for (std::size_t i = 0; i < tr.size(); ++i) out.set(i, fn(tr.field(i)));
    return out;
}

Field dx_power(const Field& f, double a) {
    return fractional_derivative(f, a, DerivativeKind::homogeneous, ZeroMode::zero_out);
}

}  // namespace

SpaceTimeTrace time_fractional_derivative(const SpaceTimeTrace& tr, double sigma, const TimeWindow& w) {
    require(std::isfinite(sigma) && sigma >= 0.0, "time derivative order must be nonnegative");
    require(w.taper >= 0.0 && w.taper < 0.5, "taper fraction must lie in [0, 1/2)");
    const std::size_t m = tr.size();
    require(m >= 16, "trace too short for the time-fractional multiplier (needs 16 snapshots)");
    if (sigma == 0.0) return tr;
    const std::size_t n = tr.grid()->n();
    std::vector<double> win(m, 1.0);
    const double ramp = w.taper * static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double d = std::min<double>(i, m - 1 - i);
        if (d < ramp) win[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * d / ramp));
    }
    auto fft = RealFft::get(m);
    std::vector<double> col(m);
    std::vector<complex> spec(fft->half()), scratch(fft->half());
    std::vector<double> mult(fft->half());
    const double period = static_cast<double>(m) * tr.dt();
    for (std::size_t j = 0; j < mult.size(); ++j)
        mult[j] = j == 0 ? 0.0 : std::pow(2.0 * std::numbers::pi * static_cast<double>(j) / period, sigma) / m;
    SpaceTimeTrace out(tr.grid(), tr.t0(), tr.dt(), tr.steps());
    const auto& src = tr.data();
    auto& dst = out.data();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t i = 0; i < m; ++i) col[i] = win[i] * src[i * n + x];
        fft->forward(col.data(), spec.data());
        for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= mult[j];
        fft->inverse(spec.data(), col.data(), scratch.data());
        for (std::size_t i = 0; i < m; ++i) dst[i * n + x] = col[i];
    }
    return out;
}

BetaValues beta_functionals(const SpaceTimeTrace& z, int k, double T, const TimeWindow& w) {
    require(k >= 4, "k must be at least 4");
    require(z.size() >= 1 && z.dt() > 0.0, "empty trace");
    require(T >= z.t0(), "T precedes the trace");
    std::size_t last = static_cast<std::size_t>(std::floor((T - z.t0()) / z.dt() * (1.0 + 1e-12) + 1e-9));
    last = std::min(last, z.steps());
    require(last + 1 >= 16, "trace too short for the time-fractional multiplier (needs 16 snapshots)");
    const SpaceTimeTrace tr = z.window(0, last);
    const double s = (k - 4.0) / (2.0 * k);
    BetaValues b;
    const SpaceTimeTrace ds = map_snapshots(tr, [s](const Field& f) { return dx_power(f, s); });
    for (std::size_t i = 0; i < ds.size(); ++i) b.alpha1 = std::max(b.alpha1, l2_norm(ds.field(i)));
    const SpaceTimeTrace d1s = map_snapshots(tr, [s](const Field& f) { return dx_power(f, 1.0 + s); });
    b.alpha2 = mixed_norm_xt(d1s, kInf, 2.0);
    b.alpha3 = mixed_norm_xt(ds, 5.0, 10.0);
    const double ax = 0.1 - 2.0 / (5.0 * k);
    const double at = 0.3 - 6.0 / (5.0 * k);
    const auto pq = beta_exponents(k);
    const SpaceTimeTrace dx = map_snapshots(tr, [ax](const Field& f) { return dx_power(f, ax); });
    b.alpha4 = mixed_norm_xt(time_fractional_derivative(dx, at, w), pq[0], pq[1]);
    return b;
}

ProbeConfig ProbeConfig::refined() const {
    ProbeConfig r = *this;
    r.n = 4 * n;
    r.L = 2.0 * L;
    r.horizon = 2.0 * horizon;
    r.time_samples = 4 * time_samples;
    return r;
}

Field ProbeDatum::sample(const GridPtr& grid) const {
    const ProbeDatum d = *this;
    return Field::sample(grid, [d](double x) {
        const double y = x - d.center;
        return std::exp(-y * y / (2.0 * d.width * d.width)) * std::cos(d.frequency * y + d.phase);
    });
}

std::vector<ProbeDatum> probe_data(std::uint64_t seed, std::size_t count) {
    NormalStream rng(seed, 0);
    std::vector<ProbeDatum> out(count);
    for (auto& d : out) {
        d.center = -2.0 + 4.0 * rng.uniform();
        d.width = 1.0 + 2.0 * rng.uniform();
        d.frequency = -1.5 + 3.0 * rng.uniform();
        d.phase = 2.0 * std::numbers::pi * rng.uniform();
    }
    return out;
}

namespace {

// V(t) f for t on the symmetric window [-horizon, horizon].
SpaceTimeTrace propagate_window(const Field& f, double horizon, std::size_t samples) {
    require(std::isfinite(horizon) && horizon > 0.0, "probe horizon must be positive");
    require(samples >= 2, "probe needs at least two time samples");
    const GridPtr& g = f.grid;
    const std::vector<complex> h0 = half_spectrum(f);
    const double dt = 2.0 * horizon / static_cast<double>(samples);
    SpaceTimeTrace tr(g, -horizon, dt, samples);
    std::vector<complex> h(h0.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.time(i);
        for (std::size_t j = 0; j < h.size(); ++j)
            h[j] = h0[j] * airy_symbol(g->frequency(j), t, j == g->nyquist_index());
        tr.set(i, from_half_spectrum(g, h));
    }
    return tr;
}

Field mean_free(const Field& f) {
    Field out = f;
    double mean = 0.0;
    for (double v : f.values) mean += v;
    mean /= static_cast<double>(f.size());
    for (double& v : out.values) v -= mean;
    return out;
}

}  // namespace

double kato_ratio(const KatoTriple& t, const Field& u0, double horizon, std::size_t time_samples) {
    const Admissibility a = validate_kato(t);
    if (!a) throw InvalidArgument("invalid Kato triple: " + a.diagnostic);
    const Field f = t.alpha < 0.0 ? mean_free(u0) : u0;
    const double n0 = l2_norm(f);
    require(n0 > 0.0, "probe datum must be nonzero");
    const Field d = dx_power(f, t.alpha);
    return mixed_norm_xt(propagate_window(d, horizon, time_samples), t.p, t.q) / n0;
}

double strichartz_ratio(const StrichartzPair& s, const Field& u0, double horizon, std::size_t time_samples) {
    const Admissibility a = validate_strichartz(s);
    if (!a) throw InvalidArgument("invalid Strichartz pair: " + a.diagnostic);
    const double n0 = l2_norm(u0);
    require(n0 > 0.0, "probe datum must be nonzero");
    const double order = 0.5 * s.beta * (1.0 - 2.0 * s.p.reciprocal());
    const Field d = dx_power(u0, order);
    return mixed_norm_tx(propagate_window(d, horizon, time_samples), s.q, s.p) / n0;
}

namespace {

template <class Ratio>
ProbeResult run_probe(const std::vector<ProbeDatum>& data, const ProbeConfig& cfg, Ratio&& ratio) {
    require(!data.empty(), "probe needs data");
    ProbeResult r;
    const ProbeConfig fine = cfg.refined();
    const GridPtr g = make_grid(cfg.n, cfg.L);
    const GridPtr gf = make_grid(fine.n, fine.L);
    for (const ProbeDatum& d : data) {
        const double a = ratio(d.sample(g), cfg);
        const double b = ratio(d.sample(gf), fine);
        r.ratios.push_back(a);
        r.ratio = std::max(r.ratio, a);
        r.refined_ratio = std::max(r.refined_ratio, b);
    }
    r.relative_change = std::abs(r.refined_ratio - r.ratio) / r.ratio;
    return r;
}

}  // namespace

ProbeResult kato_constant_probe(const KatoTriple& t, const std::vector<ProbeDatum>& data, const ProbeConfig& cfg) {
    const Admissibility a = validate_kato(t);
    if (!a) throw InvalidArgument("invalid Kato triple: " + a.diagnostic);
    return run_probe(data, cfg, [&](const Field& u0, const ProbeConfig& c) {
        return kato_ratio(t, u0, c.horizon, c.time_samples);
    });
}

ProbeResult strichartz_constant_probe(const StrichartzPair& s, const std::vector<ProbeDatum>& data,
                                      const ProbeConfig& cfg) {
    const Admissibility a = validate_strichartz(s);
    if (!a) throw InvalidArgument("invalid Strichartz pair: " + a.diagnostic);
    return run_probe(data, cfg, [&](const Field& u0, const ProbeConfig& c) {
        return strichartz_ratio(s, u0, c.horizon, c.time_samples);
    });
}

}  // namespace sgkdv
