#include "sgkdv/solver.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sgkdv/error.hpp"
#include "sgkdv/fft.hpp"
#include "sgkdv/spectral.hpp"

namespace sgkdv {

void SolverConfig::validate() const {
    require(grid != nullptr, "solver needs a grid");
    require(k >= 1, "nonlinearity degree must be a positive integer");
    require(sign == 1 || sign == -1 || sign == 0, "sign must be +1, -1 or 0");
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    require(dealias > 0.5 && dealias < 1.0, "dealias fraction must lie in (1/2, 1)");
    require(dt <= kCflConstant * grid->spacing() * (1.0 + 1e-12),
            "dt exceeds the CFL guard dt <= " + std::to_string(kCflConstant) + " dx");
}

Integrator::Integrator(const SolverConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const Grid& g = *cfg_.grid;
    const std::size_t n = g.n();
    fft_ = RealFft::get(n);
    const std::size_t h = fft_->half();
    E_.resize(h);
    E2_.resize(h);
    ik_.resize(h);
    mask_.resize(h);
    const double cut = cfg_.dealias * static_cast<double>(n / 2);
    for (std::size_t j = 0; j < h; ++j) {
        const bool nyq = j == n / 2;
        const double xi = g.frequency(j);
        E_[j] = airy_symbol(xi, cfg_.dt, nyq);
        E2_[j] = airy_symbol(xi, 0.5 * cfg_.dt, nyq);
        ik_[j] = nyq ? complex(0.0) : complex(0.0, xi);
        mask_[j] = static_cast<double>(j) <= cut ? 1.0 : 0.0;
    }
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &a_, &tmp_, &scratch_}) v->assign(h, complex(0.0));
    p1_.assign(n, 0.0);
    p2_.assign(n, 0.0);
}

Integrator::Spectrum Integrator::to_spectrum(const Field& u) const {
    require(u.grid && *u.grid == *cfg_.grid, "field grid does not match the solver grid");
    return half_spectrum(u);
}

Field Integrator::to_field(const Spectrum& s) const { return from_half_spectrum(cfg_.grid, s); }

void Integrator::to_physical(const Spectrum& u, std::vector<double>& out, bool filter) {
    const std::size_t h = u.size();
    const double inv_n = 1.0 / static_cast<double>(cfg_.grid->n());
    for (std::size_t j = 0; j < h; ++j) a_[j] = (filter ? mask_[j] : 1.0) * inv_n * u[j];
    fft_->inverse(a_.data(), out.data(), scratch_.data());
}

void Integrator::from_physical(std::vector<double>& in, Spectrum& out) {
    for (double v : in) {
        if (!std::isfinite(v)) throw InstabilityError("nonlinear term overflowed", 0.0);
    }
    fft_->forward(in.data(), out.data());
    const double s = static_cast<double>(cfg_.sign);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= s * mask_[j] * ik_[j];
}

namespace {

inline double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

void Integrator::nonlinear(const Spectrum& u, Spectrum& out) {
    if (cfg_.sign == 0) {
        std::fill(out.begin(), out.end(), complex(0.0));
        return;
    }
    to_physical(u, p1_, true);
    const int e = cfg_.k + 1;
    for (double& v : p1_) v = ipow(v, e);
    from_physical(p1_, out);
}

void Integrator::nonlinear_difference(const Spectrum& d, const Spectrum& b, Spectrum& out) {
    if (cfg_.sign == 0) {
        std::fill(out.begin(), out.end(), complex(0.0));
        return;
    }
    to_physical(d, p1_, true);
    to_physical(b, p2_, true);
    const int k = cfg_.k;
    for (std::size_t j = 0; j < p1_.size(); ++j) {
        const double bb = p2_[j];
        const double aa = bb + p1_[j];
        // sum_{i=0}^{k} a^i b^{k-i} by Horner in a with b powers
        double s = 0.0;
        double apow = 1.0;
        for (int i = 0; i <= k; ++i) {
            s += apow * ipow(bb, k - i);
            apow *= aa;
        }
        p1_[j] *= s;
    }
    from_physical(p1_, out);
}

double Integrator::l2_squared(const Spectrum& u) const {
    const std::size_t n = cfg_.grid->n();
    double s = std::norm(u[0]) + std::norm(u[n / 2]);
    for (std::size_t j = 1; j < n / 2; ++j) s += 2.0 * std::norm(u[j]);
    return s * cfg_.grid->spacing() / static_cast<double>(n);
}

void Integrator::guard(double before, const Spectrum& after, double t) const {
    const double now = l2_squared(after);
    if (!std::isfinite(now)) throw InstabilityError("non-finite state", t);
    // norm growth by more than 10x within one step
    if (now > 100.0 * before && now > 1e-200) throw InstabilityError("norm grew more than 10x in one step", t);
}

void Integrator::step(Spectrum& u, double t) {
    const std::size_t h = u.size();
    const double dt = cfg_.dt;
    const double before = l2_squared(u);
    try {
        nonlinear(u, k1_);
        for (std::size_t j = 0; j < h; ++j) tmp_[j] = E2_[j] * (u[j] + 0.5 * dt * k1_[j]);
        nonlinear(tmp_, k2_);
        for (std::size_t j = 0; j < h; ++j) tmp_[j] = E2_[j] * u[j] + 0.5 * dt * k2_[j];
        nonlinear(tmp_, k3_);
        for (std::size_t j = 0; j < h; ++j) tmp_[j] = E_[j] * u[j] + dt * E2_[j] * k3_[j];
        nonlinear(tmp_, k4_);
    } catch (const InstabilityError& e) {
        throw InstabilityError(e.what(), t);
    }
    for (std::size_t j = 0; j < h; ++j)
        u[j] = E_[j] * u[j] + dt / 6.0 * (E_[j] * k1_[j] + 2.0 * E2_[j] * (k2_[j] + k3_[j]) + k4_[j]);
    guard(before, u, t + dt);
}

void Integrator::add(Spectrum& u, const Spectrum& phi, double a) {
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += a * phi[j];
}

Field nonlinear_term(const Field& u, int k, int sign, double dealias) {
    require(u.grid != nullptr, "field has no grid");
    SolverConfig cfg;
    cfg.k = k;
    cfg.sign = sign;
    cfg.dealias = dealias;
    cfg.grid = u.grid;
    cfg.dt = u.grid->spacing();
    Integrator it(cfg);
    auto s = it.to_spectrum(u);
    Integrator::Spectrum out(s.size());
    it.nonlinear(s, out);
    return it.to_field(out);
}

Field step_deterministic(const Field& u, const SolverConfig& cfg) {
    Integrator it(cfg);
    auto s = it.to_spectrum(u);
    it.step(s, 0.0);
    return it.to_field(s);
}

Field step_stochastic(const Field& u, const SolverConfig& cfg, const NoiseSpec& spec, double dB, double t) {
    require(spec.phi.grid && *spec.phi.grid == *cfg.grid, "noise profile grid does not match the solver grid");
    require(std::isfinite(dB), "increment must be finite");
    Integrator it(cfg);
    auto s = it.to_spectrum(u);
    it.step(s, t);
    Field out = it.to_field(s);
    const double a = spec.envelope(t) * dB;
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] += a * spec.phi.values[j];
    return out;
}

double mass(const Field& u) {
    double s = 0.0;
    for (double v : u.values) s += v * v;
    return s * u.grid->spacing();
}

double energy(const Field& u, int k, int sign) {
    require(k >= 1, "nonlinearity degree must be a positive integer");
    const Field ux = derivative(u, 1);
    double kin = 0.0, pot = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        kin += ux.values[j] * ux.values[j];
        pot += ipow(u.values[j], k + 2);
    }
    const double dx = u.grid->spacing();
    return 0.5 * kin * dx + sign * pot * dx / (k + 2);
}

EnergyReport ito_drift(const Field& u, const NoiseSpec& spec, double t, int k, int sign) {
    require(spec.phi.grid && *spec.phi.grid == *u.grid, "noise profile grid does not match the field grid");
    EnergyReport r;
    r.mass = mass(u);
    r.energy = energy(u, k, sign);
    const double g = spec.envelope(t);
    const Field ux = derivative(u, 1);
    const Field px = derivative(spec.phi, 1);
    double f1 = 0.0, pp = 0.0, pxpx = 0.0, upp = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double uj = u.values[j], pj = spec.phi.values[j];
        const double uk = ipow(uj, k);
        f1 += (2.0 * uj * pj + sign * uk * uj * pj + ux.values[j] * px.values[j]);
        pp += pj * pj;
        pxpx += px.values[j] * px.values[j];
        upp += uk * pj * pj;
    }
    const double dx = u.grid->spacing();
    f1 *= dx;
    pp *= dx;
    pxpx *= dx;
    upp *= dx;
    const double half_k1 = 0.5 * (k + 1);
    r.F1 = f1 * g;
    r.F2 = (sign * half_k1 * upp + pp + pxpx) * g * g;
    r.drift = (pp + 0.5 * pxpx + sign * half_k1 * upp) * g * g;
    return r;
}

namespace {

double soliton_profile(int k, double x) {
    const double a = std::pow(0.5 * (k + 2), 1.0 / k);
    const double ch = std::cosh(0.5 * k * x);
    if (!std::isfinite(ch)) return 0.0;
    return a * std::pow(1.0 / ch, 2.0 / k);
}

}  // namespace

double soliton_residual(int k) {
    require(k >= 1, "nonlinearity degree must be a positive integer");
    auto grid = make_grid(4096, 80.0);
    Field q = Field::sample(grid, [k](double x) { return soliton_profile(k, x); });
    const Field qxx = derivative(q, 2);
    double worst = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double v = q.values[j];
        worst = std::max(worst, std::abs(qxx.values[j] - v + ipow(v, k + 1)));
    }
    return worst;
}

Field soliton(int k, double c, double x0, const GridPtr& grid, int sign) {
    require(sign < 0, "soliton profiles exist only for the focusing sign");
    require(std::isfinite(c) && c > 0.0, "soliton speed must be positive");
    require(std::isfinite(x0), "soliton center must be finite");
    require(grid != nullptr, "soliton needs a grid");
    static thread_local int checked_k = 0;
    if (checked_k != k) {
        const double r = soliton_residual(k);
        if (!(r <= 1e-10)) throw Error("closed-form soliton fails the ODE residual gate: " + std::to_string(r));
        checked_k = k;
    }
    const double amp = std::pow(c, 1.0 / k);
    const double sc = std::sqrt(c);
    const double L = grid->length();
    return Field::sample(grid, [&](double x) {
        // periodic distance to the center
        const double d = x - x0 - L * std::round((x - x0) / L);
        return amp * soliton_profile(k, sc * d);
    });
}

SimulationResult simulate(const Field& u0, const SolverConfig& cfg, const SimulationRequest& req) {
    require(req.stride >= 1, "snapshot stride must be at least 1");
    require(req.steps % req.stride == 0, "steps must be a multiple of the snapshot stride");
    Integrator it(cfg);
    Integrator::Spectrum phi;
    std::size_t first = 0;
    if (req.noise) {
        require(req.path != nullptr, "noisy simulation needs a Brownian path");
        require(req.noise->phi.grid && *req.noise->phi.grid == *cfg.grid, "noise profile grid does not match");
        phi = it.to_spectrum(req.noise->phi);
        first = req.path->node(req.t0);
        require(first + req.steps <= req.path->steps(), "Brownian path is shorter than the run");
        for (std::size_t i = first; i < first + req.steps; ++i) {
            const double h = req.path->times[i + 1] - req.path->times[i];
            require(std::abs(h - cfg.dt) <= 1e-9 * cfg.dt, "Brownian path step differs from dt");
        }
    }
    const std::size_t snaps = req.steps / req.stride;
    SimulationResult res{SpaceTimeTrace(cfg.grid, req.t0, cfg.dt * req.stride, snaps), {}, {}};
    auto s = it.to_spectrum(u0);
    auto record = [&](std::size_t idx, const Field& f) {
        res.trace.set(idx, f);
        res.mass.push_back(mass(f));
        res.energy.push_back(energy(f, cfg.k, cfg.sign));
    };
    record(0, u0);
    for (std::size_t n = 0; n < req.steps; ++n) {
        const double t = req.t0 + static_cast<double>(n) * cfg.dt;
        it.step(s, t);
        if (req.noise) {
            const double a = req.noise->envelope(t) * req.path->increments[first + n];
            Integrator::add(s, phi, a);
        }
        if ((n + 1) % req.stride == 0) record((n + 1) / req.stride, it.to_field(s));
    }
    return res;
}

}  // namespace sgkdv
