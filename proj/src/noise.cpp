#include "sgkdv/noise.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <cmath>
#include <limits>
#include <numbers>
#include <nlohmann/json.hpp>

#include "sgkdv/error.hpp"
#include "sgkdv/io.hpp"
#include "sgkdv/rng.hpp"
#include "sgkdv/spectral.hpp"

namespace sgkdv {

Envelope Envelope::power(double gamma, double amplitude) {
    require(std::isfinite(gamma) && gamma > 0.0, "envelope decay exponent must be positive");
    require(std::isfinite(amplitude), "envelope amplitude must be finite");
    Envelope e;
    e.kind_ = Kind::power;
    e.gamma_ = gamma;
    e.amplitude_ = amplitude;
    return e;
}

Envelope Envelope::constant(double value) {
    require(std::isfinite(value), "envelope value must be finite");
    Envelope e;
    e.kind_ = value == 0.0 ? Kind::zero : Kind::constant;
    e.amplitude_ = value;
    return e;
}

Envelope Envelope::zero() { return Envelope{}; }

Envelope Envelope::custom(std::function<double(double)> g, std::function<double(double)> tail_mass) {
    require(static_cast<bool>(g), "custom envelope needs a function");
    Envelope e;
    e.kind_ = Kind::custom;
    e.amplitude_ = 1.0;
    e.g_ = std::move(g);
    e.tail_ = std::move(tail_mass);
    return e;
}

double Envelope::operator()(double t) const {
    switch (kind_) {
        case Kind::power: return amplitude_ * std::pow(1.0 + t, -gamma_);
        case Kind::constant: return amplitude_;
        case Kind::zero: return 0.0;
        case Kind::custom: return g_(t);
    }
    return 0.0;
}

double Envelope::mass(double a, double b) const {
    require(b >= a, "mass interval must be ordered");
    switch (kind_) {
        case Kind::power: {
            const double a2 = amplitude_ * amplitude_;
            if (std::abs(2.0 * gamma_ - 1.0) < 1e-15) return a2 * std::log((1.0 + b) / (1.0 + a));
            const double e = 1.0 - 2.0 * gamma_;
            return a2 * (std::pow(1.0 + b, e) - std::pow(1.0 + a, e)) / e;
        }
        case Kind::constant: return amplitude_ * amplitude_ * (b - a);
        case Kind::zero: return 0.0;
        case Kind::custom:
            if (tail_) return tail_(a) - tail_(b);
            throw InvalidArgument("custom envelope without a tail-mass function has no closed-form mass");
    }
    return 0.0;
}

double Envelope::tail_mass(double t) const {
    switch (kind_) {
        case Kind::power:
            if (amplitude_ == 0.0) return 0.0;
            if (gamma_ <= 0.5) return std::numeric_limits<double>::infinity();
            return amplitude_ * amplitude_ * std::pow(1.0 + t, 1.0 - 2.0 * gamma_) / (2.0 * gamma_ - 1.0);
        case Kind::constant: return std::numeric_limits<double>::infinity();
        case Kind::zero: return 0.0;
        case Kind::custom: return tail_ ? tail_(t) : std::numeric_limits<double>::quiet_NaN();
    }
    return 0.0;
}

bool BrownianPath::uniform() const {
    if (times.size() < 3) return true;
    const double h = times[1] - times[0];
    for (std::size_t i = 1; i + 1 < times.size(); ++i)
        if (std::abs((times[i + 1] - times[i]) - h) > 1e-9 * h) return false;
    return true;
}

double BrownianPath::dt() const {
    require(times.size() >= 2, "path has no steps");
    require(uniform(), "path time grid is not uniform");
    return (times.back() - times.front()) / static_cast<double>(steps());
}

std::size_t BrownianPath::node(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    if (it != times.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - times.begin());
    if (it != times.begin() && std::abs(*(it - 1) - t) <= tol) return static_cast<std::size_t>(it - times.begin() - 1);
    throw InvalidArgument("time " + format_double(t) + " is not a node of the Brownian path");
}

BrownianPath sample_path(std::uint64_t seed, double dt, std::size_t m, double t0, std::uint64_t stream) {
    require(std::isfinite(dt) && dt > 0.0, "path step must be positive");
    require(m >= 1, "path needs at least one step");
    std::vector<double> times(m + 1);
    for (std::size_t i = 0; i <= m; ++i) times[i] = t0 + static_cast<double>(i) * dt;
    return sample_path_on(seed, std::move(times), stream);
}

BrownianPath sample_path_on(std::uint64_t seed, std::vector<double> times, std::uint64_t stream) {
    require(times.size() >= 2, "path needs at least one step");
    for (std::size_t i = 1; i < times.size(); ++i) require(times[i] > times[i - 1], "path times must increase");
    BrownianPath p;
    p.seed = seed;
    p.stream = stream;
    p.times = std::move(times);
    p.increments.resize(p.times.size() - 1);
    NormalStream rng(seed, stream);
    for (std::size_t i = 0; i < p.increments.size(); ++i)
        p.increments[i] = std::sqrt(p.times[i + 1] - p.times[i]) * rng.next();
    return p;
}

std::vector<double> graded_times(double start, double end, double ratio, const std::vector<double>& stops) {
    require(end > start && ratio > 0.0, "invalid graded grid");
    std::vector<double> s(stops);
    std::sort(s.begin(), s.end());
    std::vector<double> t{start};
    std::size_t k = 0;
    while (t.back() < end) {
        const double cur = t.back();
        const double step = ratio * (1.0 + std::abs(cur));
        double next = cur + step;
        while (k < s.size() && s[k] <= cur) ++k;
        const double target = k < s.size() ? std::min(s[k], end) : end;
        if (next >= target - 0.25 * step) next = target;
        t.push_back(next);
    }
    return t;
}

std::vector<double> uniform_then_graded(double t0, double dt, std::size_t m, double far_end, double ratio) {
    std::vector<double> t(m + 1);
    for (std::size_t i = 0; i <= m; ++i) t[i] = t0 + static_cast<double>(i) * dt;
    if (far_end > t.back()) {
        auto g = graded_times(t.back(), far_end, ratio);
        t.insert(t.end(), g.begin() + 1, g.end());
    }
    return t;
}

namespace {

struct HalfModes {
    std::vector<complex> phi;   // half spectrum of phi (plain DFT)
    std::vector<long double> cube;  // xi^3 with the Nyquist mode mapped to 0
    std::vector<double> weight;     // Parseval weights: 1 for 0 and Nyquist, 2 otherwise
    std::vector<std::size_t> active;
    double norm_factor = 0.0;       // ||z||^2 = norm_factor * sum w |z_j|^2
};

HalfModes half_modes(const Field& phi, double cutoff) {
    HalfModes h;
    const Grid& g = *phi.grid;
    h.phi = half_spectrum(phi);
    const std::size_t nh = h.phi.size();
    h.cube.resize(nh);
    h.weight.resize(nh);
    double mx = 0.0;
    for (const complex& c : h.phi) mx = std::max(mx, std::abs(c));
    for (std::size_t j = 0; j < nh; ++j) {
        const long double xi = j == g.nyquist_index() ? 0.0L : static_cast<long double>(g.frequency(j));
        h.cube[j] = xi * xi * xi;
        h.weight[j] = (j == 0 || j == g.nyquist_index()) ? 1.0 : 2.0;
        if (std::abs(h.phi[j]) > cutoff * mx) h.active.push_back(j);
    }
    h.norm_factor = g.spacing() / static_cast<double>(g.n());
    return h;
}

complex phase(long double tau, long double cube) {
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const double r = static_cast<double>(std::remainder(tau * cube, two_pi));
    return {std::cos(r), std::sin(r)};
}

void check_phi(const NoiseSpec& spec) {
    require(spec.phi.grid != nullptr && spec.phi.size() == spec.phi.grid->n(), "noise profile is not a field");
}

}  // namespace

SpaceTimeTrace stochastic_convolution(const NoiseSpec& spec, const BrownianPath& path, std::size_t stride) {
    check_phi(spec);
    require(stride >= 1, "snapshot stride must be positive");
    const double dt = path.dt();
    const std::size_t m = path.steps();
    if (m % stride != 0) throw InvalidArgument("snapshot stride does not divide the path length");
    const HalfModes h = half_modes(spec.phi, 0.0);
    const Grid& g = *spec.phi.grid;
    std::vector<complex> E(h.phi.size());
    for (std::size_t j = 0; j < E.size(); ++j) E[j] = airy_symbol(g.frequency(j), dt, j == g.nyquist_index());
    std::vector<complex> z(h.phi.size(), 0.0);
    SpaceTimeTrace tr(spec.phi.grid, path.times.front(), dt * static_cast<double>(stride), m / stride);
    for (std::size_t n = 0; n < m; ++n) {
        const double a = spec.envelope(path.times[n]) * path.increments[n];
        for (std::size_t j = 0; j < z.size(); ++j) z[j] = E[j] * (z[j] + a * h.phi[j]);
        if ((n + 1) % stride == 0) tr.set((n + 1) / stride, from_half_spectrum(spec.phi.grid, z));
    }
    return tr;
}

std::vector<double> convolution_norms(const NoiseSpec& spec, const BrownianPath& path,
                                      const std::vector<std::size_t>& steps) {
    check_phi(spec);
    const double dt = path.dt();
    const HalfModes h = half_modes(spec.phi, 0.0);
    const Grid& g = *spec.phi.grid;
    std::vector<complex> E(h.phi.size());
    for (std::size_t j = 0; j < E.size(); ++j) E[j] = airy_symbol(g.frequency(j), dt, j == g.nyquist_index());
    std::vector<complex> z(h.phi.size(), 0.0);
    std::vector<double> out(steps.size(), 0.0);
    std::size_t last = 0;
    for (std::size_t s : steps) {
        require(s <= path.steps(), "requested step beyond the path");
        last = std::max(last, s);
    }
    auto record = [&](std::size_t n) {
        double acc = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) acc += h.weight[j] * std::norm(z[j]);
        for (std::size_t k = 0; k < steps.size(); ++k)
            if (steps[k] == n) out[k] = h.norm_factor * acc;
    };
    record(0);
    for (std::size_t n = 0; n < last; ++n) {
        const double a = spec.envelope(path.times[n]) * path.increments[n];
        if (a != 0.0)
            for (std::size_t j = 0; j < z.size(); ++j) z[j] = E[j] * (z[j] + a * h.phi[j]);
        else
            for (std::size_t j = 0; j < z.size(); ++j) z[j] *= E[j];
        record(n + 1);
    }
    return out;
}

double tail_horizon(const Envelope& env, double t, double rule) {
    switch (env.kind()) {
        case Envelope::Kind::zero: return t + 1.0;
        case Envelope::Kind::power: {
            if (env.amplitude() == 0.0) return t + 1.0;
            require(env.gamma() > 0.5, "tail of the stochastic convolution needs gamma > 1/2");
            return (1.0 + t) * std::pow(rule, -1.0 / (2.0 * env.gamma() - 1.0)) - 1.0;
        }
        default: throw InvalidArgument("no truncation horizon for this envelope (tail mass diverges or is unknown)");
    }
}

void check_tail_horizon(const Envelope& env, double t, double horizon, double rule) {
    require(horizon > t, "tail horizon must exceed the start time");
    const double total = env.tail_mass(t);
    if (total == 0.0) return;
    const double rest = env.tail_mass(horizon);
    if (!(rest <= rule * total * (1.0 + 1e-9)))
        throw InvalidArgument("tail horizon " + format_double(horizon) + " violates the truncation rule at t = " +
                              format_double(t));
}

Field tail_convolution(const NoiseSpec& spec, const BrownianPath& path, double t, double horizon,
                       TailAlignment alignment) {
    check_phi(spec);
    check_tail_horizon(spec.envelope, t, horizon);
    const std::size_t i0 = path.node(t), i1 = path.node(horizon);
    const HalfModes h = half_modes(spec.phi, 1e-17);
    std::vector<complex> z(h.phi.size(), 0.0);
    for (std::size_t m = i0; m < i1; ++m) {
        const double a = spec.envelope(path.times[m]) * path.increments[m];
        if (a == 0.0) continue;
        const long double tau = static_cast<long double>(path.times[i0]) -
                                static_cast<long double>(alignment == TailAlignment::left_point ? path.times[m]
                                                                                                : path.times[m + 1]);
        for (std::size_t j : h.active) z[j] += phase(tau, h.cube[j]) * (a * h.phi[j]);
    }
    return from_half_spectrum(spec.phi.grid, z);
}

SpaceTimeTrace tail_trace(const NoiseSpec& spec, const BrownianPath& path, std::size_t first, std::size_t last,
                          TailAlignment alignment, std::size_t stride) {
    check_phi(spec);
    require(first <= last && last < path.times.size(), "invalid tail window");
    require(stride >= 1 && (last - first) % stride == 0, "snapshot stride does not divide the window");
    const double dt = last > first ? (path.times[last] - path.times[first]) / static_cast<double>(last - first) : 0.0;
    for (std::size_t n = first; n < last; ++n)
        require(std::abs(path.times[n + 1] - path.times[n] - dt) <= 1e-9 * dt, "tail window must be uniform");
    const double end = path.times.back();
    Field zlast = last + 1 < path.times.size() ? tail_convolution(spec, path, path.times[last], end, alignment)
                                               : Field(spec.phi.grid);
    std::vector<complex> z = half_spectrum(zlast);
    const HalfModes h = half_modes(spec.phi, 0.0);
    const Grid& g = *spec.phi.grid;
    std::vector<complex> back(h.phi.size());
    for (std::size_t j = 0; j < back.size(); ++j) back[j] = airy_symbol(g.frequency(j), -dt, j == g.nyquist_index());
    SpaceTimeTrace tr(spec.phi.grid, path.times[first], dt * static_cast<double>(stride), (last - first) / stride);
    tr.set(tr.steps(), zlast);
    for (std::size_t n = last; n-- > first;) {
        const double a = spec.envelope(path.times[n]) * path.increments[n];
        if (alignment == TailAlignment::left_point)
            for (std::size_t j = 0; j < z.size(); ++j) z[j] = back[j] * z[j] + a * h.phi[j];
        else
            for (std::size_t j = 0; j < z.size(); ++j) z[j] = back[j] * (z[j] + a * h.phi[j]);
        if ((n - first) % stride == 0) tr.set((n - first) / stride, from_half_spectrum(spec.phi.grid, z));
    }
    return tr;
}

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TailDecayFit tail_decay_probe(const NoiseSpec& spec, const std::vector<double>& t_grid, std::size_t n_paths,
                              const TailDecayOptions& opt) {
    check_phi(spec);
    require(t_grid.size() >= 2, "tail probe needs at least two times");
    require(n_paths >= 2, "tail probe needs at least two paths");
    std::vector<double> ts(t_grid);
    std::sort(ts.begin(), ts.end());
    require(ts.front() > 0.0, "tail probe times must be positive");
    const double horizon = tail_horizon(spec.envelope, ts.back());
    const std::vector<double> times = graded_times(ts.front(), horizon, opt.ratio, ts);
    const std::size_t steps = times.size() - 1;
    std::vector<std::size_t> at(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k)
        at[k] = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), ts[k]) - times.begin());

    const HalfModes h = half_modes(spec.phi, opt.mode_cutoff);
    const std::size_t na = h.active.size();
    // Path-independent factors exp(-i t_m xi^3) g(t_m) sqrt(dt_m) for the active modes.
    std::vector<complex> factor(steps * na);
    for (std::size_t m = 0; m < steps; ++m) {
        const double a = spec.envelope(times[m]) * std::sqrt(times[m + 1] - times[m]);
        for (std::size_t q = 0; q < na; ++q)
            factor[m * na + q] = a * phase(-static_cast<long double>(times[m]), h.cube[h.active[q]]);
    }
    std::vector<double> wphi(na);
    for (std::size_t q = 0; q < na; ++q)
        wphi[q] = h.norm_factor * h.weight[h.active[q]] * std::norm(h.phi[h.active[q]]);

    const std::size_t B = std::max<std::size_t>(2, std::min(opt.batches, n_paths));
    std::vector<std::vector<double>> batch_sum(B, std::vector<double>(ts.size(), 0.0));
    std::vector<std::size_t> batch_n(B, 0);
    std::vector<double> sum(ts.size(), 0.0), sumsq(ts.size(), 0.0);
    std::vector<double> normals(steps);
    std::vector<complex> S(na);
    for (std::size_t p = 0; p < n_paths; ++p) {
        NormalStream rng(spec.seed, opt.stream + p);
        for (double& v : normals) v = rng.next();
        std::fill(S.begin(), S.end(), complex(0.0));
        std::size_t k = ts.size();
        const std::size_t b = p * B / n_paths;
        for (std::size_t m = steps; m-- > 0;) {
            const double z = normals[m];
            const complex* f = &factor[m * na];
            for (std::size_t q = 0; q < na; ++q) S[q] += z * f[q];
            while (k > 0 && at[k - 1] == m) {
                --k;
                double acc = 0.0;
                for (std::size_t q = 0; q < na; ++q) acc += wphi[q] * std::norm(S[q]);
                sum[k] += acc;
                sumsq[k] += acc * acc;
                batch_sum[b][k] += acc;
            }
        }
        ++batch_n[b];
    }
    TailDecayFit fit;
    fit.t = ts;
    fit.horizon = horizon;
    fit.paths = n_paths;
    const double n = static_cast<double>(n_paths);
    std::vector<double> lx(ts.size()), ly(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double mean = sum[k] / n;
        const double var = std::max(0.0, (sumsq[k] - n * mean * mean) / (n - 1.0));
        fit.mean.push_back(mean);
        fit.standard_error.push_back(std::sqrt(var / n));
        const double phi2 = l2_norm(spec.phi) * l2_norm(spec.phi);
        fit.expected.push_back(spec.envelope.kind() == Envelope::Kind::power ? phi2 * spec.envelope.tail_mass(ts[k])
                                                                            : std::numeric_limits<double>::quiet_NaN());
        lx[k] = std::log1p(ts[k]);
        ly[k] = std::log(mean);
    }
    fit.slope = ols_slope(lx, ly);
    std::vector<double> slopes;
    for (std::size_t b = 0; b < B; ++b) {
        if (batch_n[b] == 0) continue;
        std::vector<double> by(ts.size());
        for (std::size_t k = 0; k < ts.size(); ++k) by[k] = std::log(batch_sum[b][k] / static_cast<double>(batch_n[b]));
        slopes.push_back(ols_slope(lx, by));
    }
    double ms = 0.0;
    for (double s : slopes) ms += s;
    ms /= static_cast<double>(slopes.size());
    double vs = 0.0;
    for (double s : slopes) vs += (s - ms) * (s - ms);
    vs /= static_cast<double>(slopes.size() - 1);
    fit.slope_stderr = std::sqrt(vs / static_cast<double>(slopes.size()));
    fit.ci_low = fit.slope - 1.96 * fit.slope_stderr;
    fit.ci_high = fit.slope + 1.96 * fit.slope_stderr;
    return fit;
}

std::string path_to_binary(const BrownianPath& p) {
    static_assert(std::endian::native == std::endian::little, "binary path export assumes a little-endian host");
    std::string out;
    out.reserve(p.increments.size() * 8);
    for (double v : p.increments) {
        char b[8];
        std::memcpy(b, &v, 8);
        out.append(b, 8);
    }
    return out;
}

std::string path_sidecar_json(const BrownianPath& p) {
    nlohmann::json j;
    j["seed"] = p.seed;
    j["stream"] = p.stream;
    j["m"] = p.steps();
    j["uniform"] = p.uniform();
    if (p.uniform()) j["dt"] = p.dt();
    j["t0"] = p.times.front();
    j["t_end"] = p.times.back();
    j["format"] = "little-endian float64 increments";
    return j.dump(2);
}

}  // namespace sgkdv
