#include "sgkdv/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "sgkdv/error.hpp"
#include "sgkdv/spectral.hpp"

namespace sgkdv {

SpaceTimeTrace decompose(const SpaceTimeTrace& u, const SpaceTimeTrace& zstar) {
    if (!aligned(u, zstar)) throw InvalidArgument("traces are not aligned");
    SpaceTimeTrace out = u;
    auto& d = out.data();
    const auto& z = zstar.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= z[i];
    return out;
}

double scattering_size(const SpaceTimeTrace& tr, int k) {
    require(k >= 4, "k must be at least 4");
    if (k == 4) return mixed_norm_xt(tr, 5.0, 10.0);
    return mixed_norm_xt(tr, 5.0 * k / 4.0, 5.0 * k / 2.0);
}

namespace {

template <class Fn>
SpaceTimeTrace map_snapshots(const SpaceTimeTrace& tr, Fn&& fn) {
    SpaceTimeTrace out(tr.grid(), tr.t0(), tr.dt(), tr.steps());
    for (std::size_t i = 0; i < tr.size(); ++i) out.set(i, fn(tr.field(i)));
    return out;
}

std::size_t snapshot_index(const SpaceTimeTrace& tr, double t) {
    const double r = (t - tr.t0()) / tr.dt();
    const double i = std::round(r);
    require(i >= 0.0 && i <= static_cast<double>(tr.steps()) && std::abs(r - i) <= 1e-9 * std::max(1.0, r),
            "time " + std::to_string(t) + " is not a snapshot of the trace");
    return static_cast<std::size_t>(i);
}

}  // namespace

VNorms v_norms(const SpaceTimeTrace& v, int k) {
    require(k >= 4, "k must be at least 4");
    VNorms n;
    const SpaceTimeTrace jv = map_snapshots(v, [](const Field& f) {
        return fractional_derivative(f, 1.0, DerivativeKind::inhomogeneous);
    });
    n.lambda1 = mixed_norm_xt(jv, 5.0, 10.0);
    n.lambda2 = mixed_norm_xt(v, 5.0 * k / 4.0, 5.0 * k / 2.0);
    n.d2_sup_x = mixed_norm_xt(map_snapshots(v, [](const Field& f) { return derivative(f, 2); }), kInf, 2.0);
    for (std::size_t i = 0; i < v.size(); ++i) n.h1_sup_t = std::max(n.h1_sup_t, sobolev_norm(v.field(i), 1.0));
    return n;
}

ScatteringReport scattering_diagnostic(const SpaceTimeTrace& u, const std::vector<double>& checkpoints,
                                       PullbackSpace space, int k, const SpaceTimeTrace* v) {
    require(checkpoints.size() >= 3, "scattering diagnostic needs at least three checkpoints");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        require(checkpoints[i] > checkpoints[i - 1], "checkpoints must increase");
    ScatteringReport r;
    r.t_checkpoints = checkpoints;
    std::vector<Field> pulled;
    for (double t : checkpoints) pulled.push_back(airy_propagate(u.field(snapshot_index(u, t)), -t));
    const double s = space == PullbackSpace::L2 ? 0.0 : 1.0;
    for (std::size_t i = 1; i < pulled.size(); ++i)
        r.cauchy_increments.push_back(sobolev_norm(pulled[i] - pulled[i - 1], s));
    r.scattering_size = scattering_size(u, k);
    if (v) r.v_norms = v_norms(*v, k);
    r.u_plus = pulled.back();
    return r;
}

namespace {

using Spectrum = Integrator::Spectrum;

void combine(Spectrum& out, const Spectrum& a, const Spectrum& ma, const Spectrum& b, double cb,
             const Spectrum* mb = nullptr) {
    // out = ma * a + cb * (mb ? mb * b : b)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = ma[j] * a[j] + cb * (mb ? (*mb)[j] * b[j] : b[j]);
}

}  // namespace

VSolution solve_v(const Field& y_init, const NoiseSpec& spec, const BrownianPath& path, double T, double horizon,
                  const SolverConfig& cfg, std::size_t stride) {
    require(horizon > T, "horizon must exceed T");
    require(stride >= 1, "stride must be at least 1");
    require(spec.phi.grid && *spec.phi.grid == *cfg.grid, "noise profile grid does not match the solver grid");
    const std::size_t first = path.node(T);
    const std::size_t last = path.node(horizon);
    const std::size_t steps = last - first;
    require(steps % stride == 0, "stride must divide the number of steps");
    for (std::size_t n = first; n < last; ++n)
        require(std::abs(path.times[n + 1] - path.times[n] - cfg.dt) <= 1e-9 * cfg.dt,
                "path steps on [T, horizon] must equal dt");

    Integrator it(cfg);
    const std::size_t h = it.full_step().size();
    const Spectrum& E = it.full_step();
    const Spectrum& E2 = it.half_step();
    const Spectrum phi = it.to_spectrum(spec.phi);
    Spectrum y = it.to_spectrum(y_init);
    Spectrum w = y;                      // u_*
    Spectrum v(h, complex(0.0));
    Field zT = tail_convolution(spec, path, T, path.times.back(), TailAlignment::step_end);
    for (double& x : zT.values) x = -x;
    Spectrum z = it.to_spectrum(zT);

    const double dt = cfg.dt;
    const double sdt = dt * static_cast<double>(stride);
    const std::size_t snaps = steps / stride;
    VSolution out{SpaceTimeTrace(cfg.grid, T, sdt, snaps), SpaceTimeTrace(cfg.grid, T, sdt, snaps),
                  SpaceTimeTrace(cfg.grid, T, sdt, snaps), SpaceTimeTrace(cfg.grid, T, sdt, snaps)};
    auto record = [&](std::size_t i) {
        out.v.set(i, it.to_field(v));
        Spectrum d(h);
        for (std::size_t j = 0; j < h; ++j) d[j] = w[j] - y[j];
        out.v_naive.set(i, it.to_field(d));
        out.y.set(i, it.to_field(y));
        out.zstar.set(i, it.to_field(z));
    };
    record(0);

    Spectrum ky1(h), ky2(h), ky3(h), ky4(h), kv1(h), kv2(h), kv3(h), kv4(h), kw1(h), kw2(h), kw3(h), kw4(h);
    Spectrum Y2(h), Y3(h), Y4(h), S(h), D(h), zh(h), zf(h);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = path.times[first + n];
        const double ny = it.l2_squared(y), nv = it.l2_squared(v) + it.l2_squared(z), nw = it.l2_squared(w);
        for (std::size_t j = 0; j < h; ++j) {
            zh[j] = E2[j] * z[j];
            zf[j] = E[j] * z[j];
        }
        try {
            // stage 1 at t
            it.nonlinear(y, ky1);
            for (std::size_t j = 0; j < h; ++j) D[j] = v[j] + z[j];
            it.nonlinear_difference(D, y, kv1);
            for (std::size_t j = 0; j < h; ++j) S[j] = w[j] + z[j];
            it.nonlinear(S, kw1);
            // stage 2 at t + dt/2
            for (std::size_t j = 0; j < h; ++j) Y2[j] = E2[j] * (y[j] + 0.5 * dt * ky1[j]);
            it.nonlinear(Y2, ky2);
            for (std::size_t j = 0; j < h; ++j) D[j] = E2[j] * (v[j] + 0.5 * dt * kv1[j]) + zh[j];
            it.nonlinear_difference(D, Y2, kv2);
            for (std::size_t j = 0; j < h; ++j) S[j] = E2[j] * (w[j] + 0.5 * dt * kw1[j]) + zh[j];
            it.nonlinear(S, kw2);
            // stage 3 at t + dt/2
            combine(Y3, y, E2, ky2, 0.5 * dt);
            it.nonlinear(Y3, ky3);
            for (std::size_t j = 0; j < h; ++j) D[j] = E2[j] * v[j] + 0.5 * dt * kv2[j] + zh[j];
            it.nonlinear_difference(D, Y3, kv3);
            for (std::size_t j = 0; j < h; ++j) S[j] = E2[j] * w[j] + 0.5 * dt * kw2[j] + zh[j];
            it.nonlinear(S, kw3);
            // stage 4 at t + dt
            combine(Y4, y, E, ky3, dt, &E2);
            it.nonlinear(Y4, ky4);
            for (std::size_t j = 0; j < h; ++j) D[j] = E[j] * v[j] + dt * E2[j] * kv3[j] + zf[j];
            it.nonlinear_difference(D, Y4, kv4);
            for (std::size_t j = 0; j < h; ++j) S[j] = E[j] * w[j] + dt * E2[j] * kw3[j] + zf[j];
            it.nonlinear(S, kw4);
        } catch (const InstabilityError& e) {
            throw InstabilityError(e.what(), t);
        }
        for (std::size_t j = 0; j < h; ++j) {
            y[j] = E[j] * y[j] + dt / 6.0 * (E[j] * ky1[j] + 2.0 * E2[j] * (ky2[j] + ky3[j]) + ky4[j]);
            v[j] = E[j] * v[j] + dt / 6.0 * (E[j] * kv1[j] + 2.0 * E2[j] * (kv2[j] + kv3[j]) + kv4[j]);
            w[j] = E[j] * w[j] + dt / 6.0 * (E[j] * kw1[j] + 2.0 * E2[j] * (kw2[j] + kw3[j]) + kw4[j]);
        }
        const double a = spec.envelope(t) * path.increments[first + n];
        for (std::size_t j = 0; j < h; ++j) z[j] = zf[j] + a * phi[j];
        it.guard(ny, y, t + dt);
        it.guard(nw, w, t + dt);
        it.guard(std::max(nv, 1e-300), v, t + dt);
        if ((n + 1) % stride == 0) record((n + 1) / stride);
    }
    return out;
}

void validate(const ScatterConfig& cfg) {
    cfg.solver.validate();
    require(cfg.u0.grid && *cfg.u0.grid == *cfg.solver.grid, "initial datum grid does not match the solver grid");
    require(cfg.noise.phi.grid && *cfg.noise.phi.grid == *cfg.solver.grid, "noise profile grid does not match");
    require(cfg.horizon > 0.0, "horizon must be positive");
    require(std::isfinite(cfg.noise.envelope.tail_mass(cfg.horizon)),
            "the noise tail int_horizon^inf g^2 diverges (power envelopes need gamma > 1/2)");
    require(cfg.checkpoints.size() >= 3, "at least three checkpoints are needed");
    require(cfg.stride >= 1, "stride must be at least 1");
    for (double t : cfg.checkpoints) require(t > 0.0 && t <= cfg.horizon, "checkpoints must lie in (0, horizon]");
    for (double t : cfg.v_starts) require(t >= 0.0 && t < cfg.horizon, "v starts must lie in [0, horizon)");
    if (cfg.solver.k == 4)
        require(l2_norm(cfg.u0) <= cfg.small_data * (1.0 + 1e-12),
                "k = 4 scattering runs need |u0|_2 <= " + std::to_string(cfg.small_data));
}

ScatterPathResult scatter_path(const ScatterConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    const double dt = cfg.solver.dt;
    const auto m = static_cast<std::size_t>(std::llround(cfg.horizon / dt));
    require(std::abs(static_cast<double>(m) * dt - cfg.horizon) <= 1e-9 * cfg.horizon, "dt must divide the horizon");
    require(m % cfg.stride == 0, "stride must divide the number of steps");
    const Envelope& env = cfg.noise.envelope;
    const bool noisy = env.kind() != Envelope::Kind::zero;
    const double far = noisy ? tail_horizon(env, cfg.horizon) : cfg.horizon + dt;
    const BrownianPath path = sample_path_on(seed, uniform_then_graded(0.0, dt, m, far, cfg.tail_ratio));

    SimulationRequest req;
    req.steps = m;
    req.stride = cfg.stride;
    req.noise = &cfg.noise;
    req.path = &path;
    const SimulationResult sim = simulate(cfg.u0, cfg.solver, req);
    SpaceTimeTrace tail = tail_trace(cfg.noise, path, 0, m, TailAlignment::step_end, cfg.stride);
    for (double& x : tail.data()) x = -x;
    const SpaceTimeTrace ustar = decompose(sim.trace, tail);

    ScatterPathResult r;
    r.seed = seed;
    const PullbackSpace space = cfg.solver.k == 4 ? PullbackSpace::L2 : PullbackSpace::H1;
    r.report = scattering_diagnostic(sim.trace, cfg.checkpoints, space, cfg.solver.k);
    double phi2 = 0.0;
    for (double x : cfg.noise.phi.values) phi2 += x * x;
    phi2 *= cfg.noise.phi.grid->spacing();
    r.tail_residual = noisy ? phi2 * env.tail_mass(cfg.horizon) : 0.0;
    for (double T : cfg.v_starts) {
        const Field yT = ustar.field(snapshot_index(ustar, T));
        const VSolution vs = solve_v(yT, cfg.noise, path, T, cfg.horizon, cfg.solver, cfg.stride);
        r.v_size.push_back(scattering_size(vs.v, cfg.solver.k));
        r.v_norm_series.push_back(v_norms(vs.v, cfg.solver.k));
        for (std::size_t i = 0; i < vs.v.size(); ++i)
            r.v_naive_gap = std::max(r.v_naive_gap, l2_norm(vs.v.field(i) - vs.v_naive.field(i)));
        if (!r.report.v_norms) r.report.v_norms = r.v_norm_series.back();
    }
    return r;
}

bool increments_decrease(const std::vector<double>& inc) {
    for (std::size_t i = 1; i < inc.size(); ++i)
        if (!(inc[i] < inc[i - 1])) return false;
    return true;
}

bool nonincreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] <= v[i - 1])) return false;
    return true;
}

}  // namespace sgkdv
