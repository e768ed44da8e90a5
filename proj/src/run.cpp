#include "sgkdv/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgkdv/ensemble.hpp"
#include "sgkdv/error.hpp"
#include "sgkdv/estimates.hpp"
#include "sgkdv/io.hpp"
#include "sgkdv/oscillatory.hpp"
#include "sgkdv/scattering.hpp"
#include "sgkdv/spectral.hpp"

namespace sgkdv {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

Field build_initial(const Manifest& m, const GridPtr& grid) {
    if (m.initial.profile == "soliton") {
        Field f = soliton(m.solver.k, m.initial.amplitude, m.initial.center, grid, m.solver.sign);
        if (m.initial.l2_norm) {
            const double n0 = l2_norm(f);
            for (double& v : f.values) v *= *m.initial.l2_norm / n0;
        }
        return f;
    }
    return build_profile(m.initial, grid);
}

namespace {

struct Context {
    Manifest m;
    fs::path out;
    unsigned jobs = 1;
    std::vector<Gate> gates;
    ojson summary;
    std::vector<std::string> outputs;

    void write(const std::string& name, const std::string& text) {
        atomic_write(out / name, text);
        outputs.push_back(name);
    }
    void gate(std::string name, bool passed, std::string detail = "") {
        gates.push_back({std::move(name), passed, std::move(detail)});
    }
};

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(jobs);
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

std::size_t steps_of(const Manifest& m) { return static_cast<std::size_t>(std::llround(m.solver.horizon / m.solver.dt)); }

double phi_norm2(const NoiseSpec& s) {
    double a = 0.0;
    for (double v : s.phi.values) a += v * v;
    return a * s.phi.grid->spacing();
}

std::string fmt(double v) { return format_double(v); }

void write_trace(Context& c, const std::string& stem, const SpaceTimeTrace& tr) {
    if (c.m.trace_format == "csv") {
        c.write(stem + ".csv", trace_to_csv(tr));
    } else if (c.m.trace_format == "binary") {
        c.write(stem + ".bin", trace_to_binary(tr));
        ojson side{{"format", "sgkdv-trace-binary"}, {"n", tr.grid()->n()}, {"L", tr.grid()->length()},
                   {"steps", tr.steps()}, {"dt", tr.dt()}, {"t0", tr.t0()}};
        c.write(stem + ".json", side.dump(2) + "\n");
    }
}

// ---------------------------------------------------------------- simulate

void run_simulate(Context& c) {
    const Manifest& m = c.m;
    const GridPtr g = build_grid(m);
    const SolverConfig cfg = build_solver(m, g);
    const Field u0 = build_initial(m, g);
    const NoiseSpec noise = build_noise(m, g);
    const bool noisy = noise.envelope.kind() != Envelope::Kind::zero;
    SimulationRequest req;
    req.steps = steps_of(m);
    req.stride = m.solver.stride;
    BrownianPath path;
    if (noisy) {
        path = sample_path(m.noise.seed, cfg.dt, req.steps);
        req.noise = &noise;
        req.path = &path;
        c.write("path.bin", path_to_binary(path));
        c.write("path.json", path_sidecar_json(path));
    }
    const SimulationResult r = simulate(u0, cfg, req);
    write_trace(c, "trace", r.trace);
    std::vector<std::string> header{"t", "mass", "energy"};
    if (noisy) header.insert(header.end(), {"F1", "F2", "drift"});
    CsvWriter csv(header);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        std::vector<double> row{r.trace.time(i), r.mass[i], r.energy[i]};
        if (noisy) {
            const EnergyReport e = ito_drift(r.trace.field(i), noise, r.trace.time(i), cfg.k, cfg.sign);
            row.insert(row.end(), {e.F1, e.F2, e.drift});
        }
        csv.row(row);
    }
    c.write("energy.csv", csv.str());
    double dm = 0.0, de = 0.0, emin = r.energy.front();
    for (std::size_t i = 0; i < r.mass.size(); ++i) {
        if (r.mass[0] != 0.0) dm = std::max(dm, std::abs(r.mass[i] / r.mass[0] - 1.0));
        if (r.energy[0] != 0.0) de = std::max(de, std::abs(r.energy[i] / r.energy[0] - 1.0));
        emin = std::min(emin, r.energy[i]);
    }
    c.summary["relative_mass_drift"] = dm;
    c.summary["relative_energy_drift"] = de;
    if (!noisy) {
        c.gate("mass_conservation", dm <= 1e-10, "relative drift " + fmt(dm) + " <= 1e-10");
        if (cfg.k % 2 == 0) c.gate("energy_conservation", de <= 1e-8, "relative drift " + fmt(de) + " <= 1e-8");
    }
    if (cfg.k % 2 == 0 && cfg.sign == 1) c.gate("energy_nonnegative", emin >= 0.0, "min energy " + fmt(emin));
}

// ------------------------------------------------------------------ oscint

void run_oscint(Context& c) {
    const OscintSpec& o = c.m.oscint;
    const std::vector<double> pts = geometric_points(o.x_min, o.x_max, o.points);
    const std::vector<double> check = geometric_points(o.x_min, o.x_max, std::max(2, o.check_points));
    struct Out {
        DecayFit fit;
        EnvelopeBound bound;
    };
    std::vector<Out> res(o.alphas.size());
    parallel_for(o.alphas.size(), c.jobs, [&](std::size_t i) {
        const double a = o.alphas[i];
        res[i].fit = fit_decay_slope(o.b, a, designated_branch(a), pts);
        res[i].bound = envelope_bound(o.b, a, res[i].fit.predicted_exponent, pts, check);
    });
    ojson fits = ojson::array();
    for (std::size_t i = 0; i < res.size(); ++i) {
        const double a = o.alphas[i];
        const DecayFit& f = res[i].fit;
        const EnvelopeBound& eb = res[i].bound;
        const std::string stem = "oscint_b" + fmt(o.b) + "_a" + fmt(a);
        CsvWriter csv({"x", "Re", "Im", "abs_error", "envelope", "predicted_bound"});
        for (std::size_t k = 0; k < f.sample_points.size(); ++k) {
            const double x = f.side * f.sample_points[k];
            const OscResult r = osc_integral_I({o.b, a, x, std::nullopt});
            csv.row({x, r.value.real(), r.value.imag(), r.abs_error, f.envelope[k],
                     eb.constant * std::pow(1.0 + f.sample_points[k], eb.exponent)});
        }
        c.write(stem + ".csv", csv.str());
        ojson j{{"b", o.b},
                {"alpha", a},
                {"branch", to_string(f.branch)},
                {"side", f.side},
                {"predicted_exponent", f.predicted_exponent},
                {"fitted_exponent", f.fitted_exponent},
                {"fitted_intercept", f.fitted_intercept},
                {"slope_stderr", f.slope_stderr},
                {"sample_points", f.sample_points},
                {"envelope", f.envelope},
                {"bound_constant", eb.constant},
                {"bound_worst_ratio", eb.worst_ratio},
                {"bound_checked", eb.checked}};
        c.write(stem + ".json", j.dump(2) + "\n");
        fits.push_back(j);
        const double dev = std::abs(f.fitted_exponent - f.predicted_exponent);
        c.gate("slope_b" + fmt(o.b) + "_a" + fmt(a), dev <= 0.1,
               "fitted " + fmt(f.fitted_exponent) + " vs predicted " + fmt(f.predicted_exponent));
        c.gate("envelope_bound_b" + fmt(o.b) + "_a" + fmt(a), eb.holds,
               "worst ratio " + fmt(eb.worst_ratio) + " with C = " + fmt(eb.constant));
    }
    c.summary["fits"] = fits;
}

// ------------------------------------------------------------------- probes

void run_probe(Context& c, bool kato) {
    const ProbeSpec& p = c.m.probe;
    const std::vector<ProbeDatum> data = probe_data(p.data_seed, p.data);
    ProbeConfig cfg;
    cfg.n = p.n;
    cfg.L = p.L;
    cfg.horizon = p.horizon;
    cfg.time_samples = p.time_samples;
    const Exponent P = Exponent::parse(p.p), Q = Exponent::parse(p.q);
    const ProbeResult r = kato ? kato_constant_probe(KatoTriple{P, Q, p.alpha}, data, cfg)
                               : strichartz_constant_probe(StrichartzPair{P, Q, p.beta}, data, cfg);
    CsvWriter csv({"datum", "center", "width", "frequency", "phase", "ratio"});
    for (std::size_t i = 0; i < data.size(); ++i)
        csv.row({static_cast<double>(i), data[i].center, data[i].width, data[i].frequency, data[i].phase, r.ratios[i]});
    c.write("probe.csv", csv.str());
    ojson j{{"p", p.p}, {"q", p.q}, {kato ? "alpha" : "beta", kato ? p.alpha : p.beta},
            {"ratio", r.ratio}, {"refined_ratio", r.refined_ratio}, {"relative_change", r.relative_change}};
    c.write("probe.json", j.dump(2) + "\n");
    c.summary["probe"] = j;
    c.gate("refinement_stable", r.stable(0.05), "relative change " + fmt(r.relative_change) + " < 0.05");
}

// ----------------------------------------------------------------- ensemble

std::vector<std::uint64_t> shard_seeds(const Manifest& m, std::size_t n_paths) {
    const auto all = ensemble_seeds(m.noise.seed, n_paths);
    std::vector<std::uint64_t> mine;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (i % m.ensemble.shard_count == m.ensemble.shard_index) mine.push_back(all[i]);
    return mine;
}

ojson partial_to_json(const EnsemblePartial& p, const std::vector<std::string>& names, const std::vector<double>& t) {
    ojson j;
    j["format"] = "sgkdv-ensemble-partial";
    j["estimators"] = names;
    j["t_grid"] = t;
    ojson vals = ojson::object();
    for (const auto& [seed, v] : p.values()) vals[std::to_string(seed)] = v;
    j["values"] = vals;
    ojson errs = ojson::object();
    for (const auto& [seed, msg] : p.errors()) errs[std::to_string(seed)] = msg;
    j["errors"] = errs;
    return j;
}

EnsemblePartial partial_from_json(const nlohmann::json& j) {
    EnsemblePartial p;
    for (const auto& [k, v] : j.at("values").items()) p.add(std::stoull(k), v.get<std::vector<double>>());
    for (const auto& [k, v] : j.at("errors").items()) p.add_error(std::stoull(k), v.get<std::string>());
    return p;
}

// Splits concatenated per-estimator values into per-estimator stats.
std::vector<EnsembleStats> split_stats(const EnsemblePartial& p, const std::vector<std::string>& names,
                                       const std::vector<double>& t) {
    std::vector<double> all_t;
    for (std::size_t e = 0; e < names.size(); ++e) all_t.insert(all_t.end(), t.begin(), t.end());
    const EnsembleStats st = p.finalize("all", all_t);
    std::vector<EnsembleStats> out;
    for (std::size_t e = 0; e < names.size(); ++e) {
        EnsembleStats s;
        s.estimator = names[e];
        s.t_grid = t;
        s.seeds = st.seeds;
        s.errors = st.errors;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::size_t k = e * t.size() + i;
            s.mean.push_back(st.mean[k]);
            s.standard_error.push_back(st.standard_error[k]);
            s.count.push_back(st.count[k]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_stats(Context& c, const std::vector<EnsembleStats>& stats) {
    CsvWriter csv({"estimator", "t", "mean", "standard_error", "count"});
    ojson js = ojson::array();
    for (const auto& s : stats) {
        for (std::size_t i = 0; i < s.t_grid.size(); ++i)
            csv.row(std::vector<std::string>{s.estimator, fmt(s.t_grid[i]), fmt(s.mean[i]), fmt(s.standard_error[i]),
                                             std::to_string(s.count[i])});
        js.push_back({{"estimator", s.estimator}, {"t_grid", s.t_grid}, {"mean", s.mean},
                      {"standard_error", s.standard_error}, {"count", s.count}, {"paths", s.seeds.size()}});
    }
    c.write("ensemble.csv", csv.str());
    c.write("ensemble.json", js.dump(2) + "\n");
    ojson errs = ojson::array();
    if (!stats.empty())
        for (const auto& e : stats.front().errors) errs.push_back({{"seed", e.seed}, {"message", e.message}});
    c.write("errors.json", errs.dump(2) + "\n");
    c.summary["failed_members"] = errs.size();
}

void ensemble_gates(Context& c, const std::vector<EnsembleStats>& stats) {
    const Manifest& m = c.m;
    const GridPtr g = build_grid(m);
    const NoiseSpec noise = build_noise(m, g);
    const double p2 = phi_norm2(noise);
    const Field u0 = build_initial(m, g);
    const double m0 = mass(u0);
    if (!stats.empty()) {
        const auto& e = stats.front().errors;
        c.gate("no_failed_members", e.empty(), std::to_string(e.size()) + " failed members");
    }
    for (const auto& s : stats) {
        std::function<double(double)> expected;
        if (s.estimator == "mass")
            expected = [&](double t) { return m0 + p2 * noise.envelope.mass(0.0, t); };
        else if (s.estimator == "z_norm2")
            expected = [&](double t) { return p2 * noise.envelope.mass(0.0, t); };
        else if (s.estimator == "zstar_norm2")
            expected = [&](double t) { return p2 * noise.envelope.tail_mass(t); };
        if (!expected) continue;
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < s.t_grid.size(); ++i) {
            if (s.t_grid[i] == 0.0 && s.estimator != "zstar_norm2") continue;
            const double dev = std::abs(s.mean[i] - expected(s.t_grid[i]));
            const double tol = 3.0 * s.standard_error[i];
            ok = ok && dev <= tol;
            detail += "t=" + fmt(s.t_grid[i]) + ": |dev| " + fmt(dev) + " vs 3SE " + fmt(tol) + "; ";
        }
        c.gate(s.estimator + "_identity", ok, detail);
    }
}

std::vector<double> ensemble_member(const Manifest& m, const std::vector<std::string>& names, std::uint64_t seed) {
    const GridPtr g = build_grid(m);
    const SolverConfig cfg = build_solver(m, g);
    const NoiseSpec noise = build_noise(m, g);
    const std::size_t steps = steps_of(m);
    const bool tail = std::find(names.begin(), names.end(), "zstar_norm2") != names.end();
    const bool noisy = noise.envelope.kind() != Envelope::Kind::zero;
    BrownianPath path;
    if (tail && noisy) {
        const double far = tail_horizon(noise.envelope, m.solver.horizon);
        path = sample_path_on(seed, uniform_then_graded(0.0, cfg.dt, steps, far, 2e-3));
    } else {
        path = sample_path(seed, cfg.dt, steps);
    }
    const bool need_u = std::any_of(names.begin(), names.end(), [](const std::string& n) {
        return n != "z_norm2" && n != "zstar_norm2";
    });
    SimulationResult sim;
    if (need_u) {
        SimulationRequest req;
        req.steps = steps;
        req.stride = m.solver.stride;
        if (noisy) {
            req.noise = &noise;
            req.path = &path;
        }
        sim = simulate(build_initial(m, g), cfg, req);
    }
    const double snap = cfg.dt * static_cast<double>(m.solver.stride);
    std::vector<std::size_t> idx;
    for (double t : m.ensemble.t_grid) idx.push_back(static_cast<std::size_t>(std::llround(t / snap)));
    std::vector<double> out;
    for (const auto& name : names) {
        if (name == "z_norm2") {
            std::vector<std::size_t> st;
            for (double t : m.ensemble.t_grid) st.push_back(static_cast<std::size_t>(std::llround(t / cfg.dt)));
            BrownianPath head = path;
            head.times.resize(steps + 1);
            head.increments.resize(steps);
            const auto v = noisy ? convolution_norms(noise, head, st) : std::vector<double>(st.size(), 0.0);
            out.insert(out.end(), v.begin(), v.end());
            continue;
        }
        if (name == "zstar_norm2") {
            for (double t : m.ensemble.t_grid) {
                if (!noisy) {
                    out.push_back(0.0);
                    continue;
                }
                const Field z = tail_convolution(noise, path, t, path.times.back(), TailAlignment::left_point);
                out.push_back(mass(z));
            }
            continue;
        }
        double running = 0.0;
        std::size_t done = 0;
        for (std::size_t i : idx) {
            const Field f = sim.trace.field(i);
            const double M = sim.mass[i], E = sim.energy[i];
            if (name == "mass") out.push_back(M);
            else if (name == "energy") out.push_back(E);
            else if (name == "mass_energy") out.push_back(M + E);
            else if (name == "mass_energy_sq") out.push_back((M + E) * (M + E));
            else if (name == "l2_norm") out.push_back(std::sqrt(M));
            else if (name == "ito_drift") out.push_back(ito_drift(f, noise, sim.trace.time(i), cfg.k, cfg.sign).drift);
            else if (name == "sup_mass_energy" || name == "sup_mass_energy_sq") {
                for (; done <= i; ++done) running = std::max(running, sim.mass[done] + sim.energy[done]);
                out.push_back(name == "sup_mass_energy" ? running : running * running);
            }
        }
    }
    return out;
}

std::string shard_suffix(const Manifest& m) {
    if (m.ensemble.shard_count == 1) return "";
    return "_shard" + std::to_string(m.ensemble.shard_index) + "of" + std::to_string(m.ensemble.shard_count);
}

void ensemble_finish(Context& c, const EnsemblePartial& p) {
    const auto stats = split_stats(p, c.m.estimators, c.m.ensemble.t_grid);
    write_stats(c, stats);
    ensemble_gates(c, stats);
}

void run_ensemble(Context& c) {
    const Manifest& m = c.m;
    const std::vector<std::string>& names = m.estimators;
    const auto seeds = shard_seeds(m, m.ensemble.paths);
    const Manifest mm = m;
    const EnsemblePartial p = ensemble_map(
        seeds, [&](std::uint64_t s) { return ensemble_member(mm, names, s); }, names.size() * m.ensemble.t_grid.size(),
        c.jobs);
    c.write("partial" + shard_suffix(m) + ".json", partial_to_json(p, names, m.ensemble.t_grid).dump(2) + "\n");
    c.summary["paths_in_shard"] = seeds.size();
    if (m.ensemble.shard_count > 1) return;
    ensemble_finish(c, p);
}

// --------------------------------------------------------------------- beta

std::vector<double> beta_t_grid(const std::vector<double>& Ts, std::size_t per) {
    std::vector<double> t_all;
    for (double T : Ts)
        for (std::size_t j = 0; j < per; ++j) t_all.push_back(T);
    t_all.push_back(0.0);
    return t_all;
}

void beta_finish(Context& c, const EnsemblePartial& p) {
    const Manifest& m = c.m;
    const std::vector<double>& Ts = m.beta.T;
    const int k = m.solver.k;
    const std::size_t per = 5;
    const std::vector<double> t_all = beta_t_grid(Ts, per);
    const EnsembleStats st = p.finalize("beta", t_all);
    CsvWriter csv({"T", "beta1", "beta1_se", "beta2", "beta2_se", "beta3", "beta3_se", "beta4", "beta4_se",
                   "mean_abs_alpha3_minus_alpha4"});
    std::vector<double> b1;
    double worst34 = 0.0;
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        const std::size_t o = i * per;
        csv.row({Ts[i], st.mean[o], st.standard_error[o], st.mean[o + 1], st.standard_error[o + 1], st.mean[o + 2],
                 st.standard_error[o + 2], st.mean[o + 3], st.standard_error[o + 3], st.mean[o + 4]});
        b1.push_back(st.mean[o]);
        worst34 = std::max(worst34, st.mean[o + 4]);
    }
    c.write("beta.csv", csv.str());
    const double mono = st.mean.back();
    c.gate("nondecreasing_in_T", mono == 1.0, "fraction of paths " + fmt(mono));
    if (k == 4) c.gate("alpha3_equals_alpha4", worst34 <= 1e-9, "mean |alpha3 - alpha4| " + fmt(worst34));
    if (Ts.size() >= 2 && m.noise.envelope == "constant") {
        const double slope = log_log_slope(Ts, b1);
        c.summary["beta1_slope"] = slope;
        c.gate("beta1_linear_growth", slope >= 0.8 && slope <= 1.2, "log-log slope " + fmt(slope));
    }
    ojson errs = ojson::array();
    for (const auto& e : st.errors) errs.push_back({{"seed", e.seed}, {"message", e.message}});
    c.write("errors.json", errs.dump(2) + "\n");
    c.gate("no_failed_members", st.errors.empty(), std::to_string(st.errors.size()) + " failed members");
}

void run_beta(Context& c) {
    const Manifest& m = c.m;
    const GridPtr g = build_grid(m);
    const NoiseSpec noise = build_noise(m, g);
    const std::size_t steps = steps_of(m);
    const std::vector<double> Ts = m.beta.T;
    const int k = m.solver.k;
    const double dt = m.solver.dt;
    const std::size_t stride = m.solver.stride;
    // per T: alpha_1..4 squared, |alpha3 - alpha4|; then one monotonicity flag
    const std::size_t per = 5;
    const auto est = [&](std::uint64_t seed) {
        const BrownianPath path = sample_path(seed, dt, steps);
        const SpaceTimeTrace z = stochastic_convolution(noise, path, stride);
        std::vector<double> v;
        std::vector<BetaValues> bs;
        for (double T : Ts) {
            const BetaValues b = beta_functionals(z, k, T);
            bs.push_back(b);
            v.insert(v.end(), {b.alpha1 * b.alpha1, b.alpha2 * b.alpha2, b.alpha3 * b.alpha3, b.alpha4 * b.alpha4,
                               std::abs(b.alpha3 - b.alpha4)});
        }
        bool mono = true;
        for (std::size_t i = 1; i < bs.size(); ++i)
            mono = mono && bs[i].alpha1 >= bs[i - 1].alpha1 && bs[i].alpha2 >= bs[i - 1].alpha2 &&
                   bs[i].alpha3 >= bs[i - 1].alpha3;
        v.push_back(mono ? 1.0 : 0.0);
        return v;
    };
    const auto seeds = shard_seeds(m, m.ensemble.paths);
    const std::vector<double> t_all = beta_t_grid(Ts, per);
    const EnsemblePartial p = ensemble_map(seeds, est, t_all.size(), c.jobs);
    c.write("partial" + shard_suffix(m) + ".json",
            partial_to_json(p, {"beta"}, t_all).dump(2) + "\n");
    if (m.ensemble.shard_count > 1) return;
    beta_finish(c, p);
}

// ------------------------------------------------------------------ scatter

void run_scatter(Context& c) {
    const Manifest& m = c.m;
    const GridPtr g = build_grid(m);
    ScatterConfig sc;
    sc.solver = build_solver(m, g);
    sc.u0 = build_initial(m, g);
    sc.noise = build_noise(m, g);
    sc.horizon = m.solver.horizon;
    sc.checkpoints = m.scatter.checkpoints;
    sc.v_starts = m.scatter.v_starts;
    sc.stride = m.solver.stride;
    sc.tail_ratio = m.scatter.tail_ratio;
    sc.small_data = m.scatter.small_data;
    validate(sc);
    const auto seeds = ensemble_seeds(m.noise.seed, m.scatter.paths);
    std::vector<std::optional<ScatterPathResult>> res(seeds.size());
    std::vector<std::string> errs(seeds.size());
    parallel_for(seeds.size(), c.jobs, [&](std::size_t i) {
        try {
            res[i] = scatter_path(sc, seeds[i]);
        } catch (const std::exception& e) {
            errs[i] = e.what();
        }
    });
    ojson paths = ojson::array();
    CsvWriter csv({"seed", "t_from", "t_to", "increment"});
    std::size_t ok_a = 0, ok_b = 0, ok_l1 = 0, ok_l2 = 0, ok_d2 = 0, ok_h1 = 0, failed = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!res[i]) {
            ++failed;
            paths.push_back({{"seed", seeds[i]}, {"error", errs[i]}});
            continue;
        }
        const ScatterPathResult& r = *res[i];
        const auto& inc = r.report.cauchy_increments;
        for (std::size_t k = 0; k < inc.size(); ++k)
            csv.row(std::vector<std::string>{std::to_string(seeds[i]), fmt(sc.checkpoints[k]), fmt(sc.checkpoints[k + 1]),
                                             fmt(inc[k])});
        if (increments_decrease(inc) && inc.back() <= m.scatter.final_increment) ++ok_a;
        if (nonincreasing(r.v_size)) ++ok_b;
        std::vector<double> l1, l2, d2, h1;
        ojson vn = ojson::array();
        for (const auto& n : r.v_norm_series) {
            l1.push_back(n.lambda1);
            l2.push_back(n.lambda2);
            d2.push_back(n.d2_sup_x);
            h1.push_back(n.h1_sup_t);
            vn.push_back({{"lambda1", n.lambda1}, {"lambda2", n.lambda2}, {"d2_sup_x", n.d2_sup_x}, {"h1_sup_t", n.h1_sup_t}});
        }
        ok_l1 += nonincreasing(l1);
        ok_l2 += nonincreasing(l2);
        ok_d2 += nonincreasing(d2);
        ok_h1 += nonincreasing(h1);
        ojson uplus = ojson::array();
        paths.push_back({{"seed", seeds[i]},
                         {"checkpoints", sc.checkpoints},
                         {"cauchy_increments", inc},
                         {"scattering_size", r.report.scattering_size},
                         {"v_starts", sc.v_starts},
                         {"v_scattering_size", r.v_size},
                         {"v_norms", vn},
                         {"v_naive_gap", r.v_naive_gap},
                         {"tail_residual", r.tail_residual}});
        if (i == 0) c.write("u_plus.csv", field_to_csv(r.report.u_plus));
    }
    c.write("scatter.json", paths.dump(2) + "\n");
    c.write("increments.csv", csv.str());
    const double need = m.scatter.pass_fraction * static_cast<double>(seeds.size());
    auto frac = [&](std::size_t k) { return std::to_string(k) + "/" + std::to_string(seeds.size()); };
    c.gate("cauchy_increments_decrease", static_cast<double>(ok_a) >= need - 1e-9,
           frac(ok_a) + " paths decrease with final increment <= " + fmt(m.scatter.final_increment));
    c.gate("v_scattering_size_nonincreasing", static_cast<double>(ok_b) >= need - 1e-9, frac(ok_b) + " paths");
    c.summary["v_norms_nonincreasing"] = {{"lambda1", frac(ok_l1)}, {"lambda2", frac(ok_l2)},
                                          {"d2_sup_x", frac(ok_d2)}, {"h1_sup_t", frac(ok_h1)}};
    c.gate("no_failed_paths", failed == 0, std::to_string(failed) + " failed paths");
}

ojson gates_json(const std::vector<Gate>& gates) {
    ojson a = ojson::array();
    for (const auto& g : gates) a.push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
    return a;
}

fs::path resolve_out(const Manifest& m, const RunOptions& opt) {
    if (opt.out) return *opt.out;
    if (const char* env = std::getenv("SGKDV_OUTPUT_DIR"); env && *env) return env;
    return m.output;
}

void write_error(const fs::path& dir, const std::vector<std::string>& errors, const std::vector<std::string>& warnings) {
    try {
        fs::create_directories(dir);
        ojson j{{"errors", errors}, {"warnings", warnings}};
        atomic_write(dir / "error.json", j.dump(2) + "\n");
    } catch (const std::exception&) {
    }
}

}  // namespace

RunResult run(Manifest m, const RunOptions& opt, const std::vector<std::string>& warnings) {
    RunResult rr;
    rr.warnings = warnings;
    if (opt.seed) {
        m.noise.seed = *opt.seed;
        if (m.experiment == "probe-kato" || m.experiment == "probe-strichartz") m.probe.data_seed = *opt.seed;
    }
    rr.out_dir = resolve_out(m, opt);
    {
        std::vector<std::string> errors, more;
        check_manifest(m, errors, more);
        if (!errors.empty()) {
            rr.exit_code = 2;
            rr.errors = errors;
            write_error(rr.out_dir, rr.errors, rr.warnings);
            return rr;
        }
    }
    Context c;
    c.m = m;
    c.out = rr.out_dir;
    c.jobs = std::max(1u, opt.jobs);
    const std::string suffix =
        (m.experiment == "ensemble" || m.experiment == "beta") ? shard_suffix(m) : std::string();
    try {
        fs::create_directories(c.out);
        c.write("manifest" + suffix + ".resolved.json", serialize_manifest(m));
        if (m.experiment == "simulate") run_simulate(c);
        else if (m.experiment == "oscint") run_oscint(c);
        else if (m.experiment == "probe-kato") run_probe(c, true);
        else if (m.experiment == "probe-strichartz") run_probe(c, false);
        else if (m.experiment == "ensemble") run_ensemble(c);
        else if (m.experiment == "beta") run_beta(c);
        else if (m.experiment == "scatter") run_scatter(c);
    } catch (const std::exception& e) {
        rr.exit_code = 1;
        rr.errors.push_back(e.what());
    }
    rr.gates = c.gates;
    if (rr.exit_code == 0)
        for (const auto& g : rr.gates)
            if (!g.passed) rr.exit_code = 3;
    ojson s;
    s["experiment"] = m.experiment;
    s["exit_code"] = rr.exit_code;
    s["gates"] = gates_json(rr.gates);
    s["all_passed"] = rr.exit_code == 0;
    s["warnings"] = rr.warnings;
    s["errors"] = rr.errors;
    s["outputs"] = c.outputs;
    for (const auto& [k, v] : c.summary.items()) s["results"][k] = v;
    try {
        fs::create_directories(c.out);
        atomic_write(c.out / ("summary" + suffix + ".json"), s.dump(2) + "\n");
    } catch (const std::exception& e) {
        rr.errors.push_back(e.what());
        if (rr.exit_code == 0) rr.exit_code = 1;
    }
    if (rr.exit_code == 1) write_error(rr.out_dir, rr.errors, rr.warnings);
    return rr;
}

RunResult run_text(const std::string& text, const RunOptions& opt) {
    ParseOutcome p = parse_manifest(text);
    if (!p.ok()) {
        RunResult rr;
        rr.exit_code = 2;
        rr.errors = p.errors;
        rr.warnings = p.warnings;
        rr.out_dir = opt.out ? fs::path(*opt.out) : fs::path();
        if (rr.out_dir.empty()) {
            if (const char* env = std::getenv("SGKDV_OUTPUT_DIR"); env && *env) rr.out_dir = env;
        }
        if (rr.out_dir.empty()) {
            const nlohmann::json raw = nlohmann::json::parse(text, nullptr, false);
            if (raw.is_object() && raw.contains("output") && raw["output"].is_string())
                rr.out_dir = raw["output"].get<std::string>();
        }
        if (!rr.out_dir.empty()) write_error(rr.out_dir, rr.errors, rr.warnings);
        return rr;
    }
    return run(std::move(*p.manifest), opt, p.warnings);
}

RunResult report(const fs::path& dir) {
    RunResult rr;
    rr.out_dir = dir;
    try {
        require(fs::is_directory(dir), "not a directory: " + dir.string());
        std::vector<fs::path> partials, summaries;
        for (const auto& e : fs::directory_iterator(dir)) {
            const std::string name = e.path().filename().string();
            if (name.rfind("partial", 0) == 0 && e.path().extension() == ".json") partials.push_back(e.path());
            if (name.rfind("summary", 0) == 0 && e.path().extension() == ".json") summaries.push_back(e.path());
        }
        std::sort(partials.begin(), partials.end());
        std::sort(summaries.begin(), summaries.end());
        ojson rep;
        bool ok = true;
        if (!partials.empty()) {
            EnsemblePartial all;
            nlohmann::json first;
            for (const auto& p : partials) {
                const nlohmann::json j = nlohmann::json::parse(read_file(p));
                if (first.is_null()) first = j;
                require(j.at("estimators") == first.at("estimators") && j.at("t_grid") == first.at("t_grid"),
                        "partials describe different experiments: " + p.string());
                all.merge(partial_from_json(j));
            }
            std::optional<Manifest> man;
            for (const auto& e : fs::directory_iterator(dir)) {
                const std::string name = e.path().filename().string();
                if (name.rfind("manifest", 0) == 0 && name.find(".resolved.json") != std::string::npos) {
                    ParseOutcome po = parse_manifest(read_file(e.path()));
                    require(po.ok(), "cannot read " + e.path().string());
                    man = std::move(po.manifest);
                    break;
                }
            }
            require(man.has_value(), "no resolved manifest beside the partials in " + dir.string());
            Context c;
            c.m = *man;
            c.m.ensemble.shard_index = 0;
            c.m.ensemble.shard_count = 1;
            c.out = dir;
            if (c.m.experiment == "beta") beta_finish(c, all);
            else ensemble_finish(c, all);
            for (const auto& g : c.gates) {
                ok = ok && g.passed;
                rr.gates.push_back({"merged:" + g.name, g.passed, g.detail});
            }
            rep["merged_partials"] = partials.size();
            rep["paths"] = all.size();
            rep["failed_members"] = all.errors().size();
            rep["outputs"] = c.outputs;
        }
        ojson agg = ojson::array();
        for (const auto& p : summaries) {
            const nlohmann::json j = nlohmann::json::parse(read_file(p));
            for (const auto& g : j.value("gates", nlohmann::json::array())) {
                Gate gt{j.value("experiment", "") + ":" + g.value("name", ""), g.value("passed", false),
                        g.value("detail", "")};
                ok = ok && gt.passed;
                rr.gates.push_back(gt);
            }
            agg.push_back({{"file", p.filename().string()}, {"exit_code", j.value("exit_code", -1)}});
        }
        rep["summaries"] = agg;
        rep["gates"] = gates_json(rr.gates);
        rep["all_passed"] = ok;
        atomic_write(dir / "report.json", rep.dump(2) + "\n");
        rr.exit_code = ok ? 0 : 3;
    } catch (const std::exception& e) {
        rr.exit_code = 1;
        rr.errors.push_back(e.what());
    }
    return rr;
}

}  // namespace sgkdv
