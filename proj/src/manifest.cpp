#include "sgkdv/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sgkdv/error.hpp"
#include "sgkdv/estimates.hpp"
#include "sgkdv/exponent.hpp"
#include "sgkdv/io.hpp"
#include "sgkdv/spectral.hpp"

namespace sgkdv {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> v{"simulate", "oscint", "probe-kato", "probe-strichartz",
                                            "beta", "ensemble", "scatter"};
    return v;
}

const std::vector<std::string>& known_estimators() {
    static const std::vector<std::string> v{"mass",          "energy",         "mass_energy", "mass_energy_sq",
                                            "sup_mass_energy", "sup_mass_energy_sq", "ito_drift", "l2_norm",
                                            "z_norm2",       "zstar_norm2"};
    return v;
}

bool is_energy_estimator(const std::string& name) {
    return name == "energy" || name == "mass_energy" || name == "mass_energy_sq" || name == "sup_mass_energy" ||
           name == "sup_mass_energy_sq" || name == "ito_drift";
}

static_assert(std::is_same_v<std::uint64_t, std::size_t>, "seeds are read as size_t");

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

const char* type_name(const json& j) { return j.type_name(); }

class Reader {
public:
    Reader(const json* j, std::string path, std::vector<std::string>& errors)
        : j_(j), path_(std::move(path)), errors_(errors) {}

    void get(const char* key, int& out) { read(key, out, [&](const json& v, int& o) {
        if (!v.is_number_integer()) return false;
        const auto x = v.get<long long>();
        if (x < INT32_MIN || x > INT32_MAX) return false;
        o = static_cast<int>(x);
        return true;
    }, "integer"); }
    void get(const char* key, std::size_t& out) { read(key, out, [&](const json& v, std::size_t& o) {
        if (!v.is_number_unsigned()) return false;
        o = v.get<std::size_t>();
        return true;
    }, "nonnegative integer"); }
    void get(const char* key, double& out) { read(key, out, [&](const json& v, double& o) {
        if (!v.is_number()) return false;
        o = v.get<double>();
        return true;
    }, "number"); }
    void get(const char* key, bool& out) { read(key, out, [&](const json& v, bool& o) {
        if (!v.is_boolean()) return false;
        o = v.get<bool>();
        return true;
    }, "boolean"); }
    void get(const char* key, std::string& out) { read(key, out, [&](const json& v, std::string& o) {
        if (!v.is_string()) return false;
        o = v.get<std::string>();
        return true;
    }, "string"); }
    void get(const char* key, std::optional<double>& out) { read(key, out, [&](const json& v, std::optional<double>& o) {
        if (v.is_null()) {
            o.reset();
            return true;
        }
        if (!v.is_number()) return false;
        o = v.get<double>();
        return true;
    }, "number or null"); }
    void get(const char* key, std::vector<double>& out) { read(key, out, [&](const json& v, std::vector<double>& o) {
        if (!v.is_array()) return false;
        std::vector<double> r;
        for (const auto& e : v) {
            if (!e.is_number()) return false;
            r.push_back(e.get<double>());
        }
        o = std::move(r);
        return true;
    }, "array of numbers"); }
    void get(const char* key, std::vector<std::string>& out) { read(key, out, [&](const json& v, std::vector<std::string>& o) {
        if (!v.is_array()) return false;
        std::vector<std::string> r;
        for (const auto& e : v) {
            if (!e.is_string()) return false;
            r.push_back(e.get<std::string>());
        }
        o = std::move(r);
        return true;
    }, "array of strings"); }
    // Exponent given as a number or as "inf".
    void get_exponent(const char* key, std::string& out) { read(key, out, [&](const json& v, std::string& o) {
        try {
            if (v.is_number()) o = Exponent(v.get<double>()).str();
            else if (v.is_string()) o = Exponent::parse(v.get<std::string>()).str();
            else return false;
        } catch (const std::exception&) {
            return false;
        }
        return true;
    }, "exponent (number or \"inf\")"); }

    Reader child(const char* key) {
        seen_.insert(key);
        if (!j_ || !j_->contains(key)) return Reader(nullptr, sub(key), errors_);
        const json& v = (*j_)[key];
        if (!v.is_object()) {
            errors_.push_back(sub(key) + ": expected object, got " + type_name(v));
            return Reader(nullptr, sub(key), errors_);
        }
        return Reader(&v, sub(key), errors_);
    }

    void finish() const {
        if (!j_) return;
        for (const auto& [k, v] : j_->items())
            if (!seen_.contains(k)) errors_.push_back(sub(k) + ": unknown key");
    }

private:
    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T, class Conv>
    void read(const char* key, T& out, Conv&& conv, const char* expected) {
        seen_.insert(key);
        if (!j_ || !j_->contains(key)) return;
        const json& v = (*j_)[key];
        T tmp = out;
        if (!conv(v, tmp)) {
            errors_.push_back(sub(key) + ": expected " + expected + ", got " + type_name(v));
            return;
        }
        out = std::move(tmp);
    }

    const json* j_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

void read_profile(Reader r, ProfileSpec& p) {
    r.get("profile", p.profile);
    r.get("amplitude", p.amplitude);
    r.get("width", p.width);
    r.get("center", p.center);
    r.get("frequency", p.frequency);
    r.get("l2_norm", p.l2_norm);
    r.finish();
}

ojson write_profile(const ProfileSpec& p) {
    ojson j;
    j["profile"] = p.profile;
    j["amplitude"] = p.amplitude;
    j["width"] = p.width;
    j["center"] = p.center;
    j["frequency"] = p.frequency;
    j["l2_norm"] = p.l2_norm ? ojson(*p.l2_norm) : ojson(nullptr);
    return j;
}

// Rejects duplicate keys, which the JSON library would otherwise overwrite silently.
json parse_strict(const std::string& text, std::vector<std::string>& errors) {
    std::vector<std::set<std::string>> stack;
    auto cb = [&](int, json::parse_event_t ev, json& parsed) {
        if (ev == json::parse_event_t::object_start) stack.emplace_back();
        else if (ev == json::parse_event_t::object_end && !stack.empty()) stack.pop_back();
        else if (ev == json::parse_event_t::key && !stack.empty()) {
            const std::string k = parsed.get<std::string>();
            if (!stack.back().insert(k).second) errors.push_back("duplicate key: " + k);
        }
        return true;
    };
    return json::parse(text, cb);
}

bool finite(double v) { return std::isfinite(v); }

void check_profile(const ProfileSpec& p, const std::string& where, std::vector<std::string>& e) {
    static const std::vector<std::string> kinds{"gaussian", "sech", "soliton", "zero"};
    if (!contains(kinds, p.profile)) e.push_back(where + ".profile: unknown profile '" + p.profile + "'");
    if (!finite(p.amplitude)) e.push_back(where + ".amplitude: must be finite");
    if (!(finite(p.width) && p.width > 0.0)) e.push_back(where + ".width: must be positive");
    if (!finite(p.center) || !finite(p.frequency)) e.push_back(where + ": center and frequency must be finite");
    if (p.l2_norm && !(finite(*p.l2_norm) && *p.l2_norm >= 0.0)) e.push_back(where + ".l2_norm: must be nonnegative");
    if (p.profile == "soliton" && !(p.amplitude > 0.0)) e.push_back(where + ": soliton speed (amplitude) must be positive");
}

bool is_pow2(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

bool near_multiple(double t, double step) {
    const double r = t / step;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

}  // namespace

void check_manifest(const Manifest& m, std::vector<std::string>& e, std::vector<std::string>& w) {
    if (m.schema_version != kSchemaVersion)
        e.push_back("schema_version: unsupported version " + std::to_string(m.schema_version));
    if (!contains(known_experiments(), m.experiment)) e.push_back("experiment: unknown kind '" + m.experiment + "'");
    if (!is_pow2(m.grid.n)) e.push_back("grid.n: must be a power of two >= 8");
    if (!(finite(m.grid.L) && m.grid.L > 0.0)) e.push_back("grid.L: must be positive");
    const SolverSpec& s = m.solver;
    if (s.k < 4) e.push_back("solver.k: nonlinearity degree must be an integer >= 4");
    if (s.sign != 1 && s.sign != -1 && s.sign != 0) e.push_back("solver.sign: must be +1, -1 or 0");
    if (!(finite(s.dt) && s.dt > 0.0)) e.push_back("solver.dt: must be positive");
    if (!(s.dealias > 0.5 && s.dealias < 1.0)) e.push_back("solver.dealias: must lie in (1/2, 1)");
    if (!(finite(s.horizon) && s.horizon > 0.0)) e.push_back("solver.horizon: must be positive");
    if (s.stride < 1) e.push_back("solver.stride: must be at least 1");
    const bool solver_used = m.experiment == "simulate" || m.experiment == "ensemble" || m.experiment == "scatter";
    if (solver_used && is_pow2(m.grid.n) && m.grid.L > 0.0 && s.dt > 0.0) {
        const double dx = m.grid.L / static_cast<double>(m.grid.n);
        if (s.dt > SolverConfig::kCflConstant * dx * (1.0 + 1e-12))
            e.push_back("solver.dt: exceeds the CFL guard dt <= dx = " + format_double(dx));
        if (!near_multiple(s.horizon, s.dt)) e.push_back("solver.horizon: must be a multiple of dt");
        else if (s.stride >= 1 && std::llround(s.horizon / s.dt) % static_cast<long long>(s.stride) != 0)
            e.push_back("solver.stride: must divide horizon / dt");
    }
    check_profile(m.initial, "initial", e);
    check_profile(m.noise.phi, "noise.phi", e);
    if (m.initial.profile == "soliton" && s.sign != -1) e.push_back("initial: soliton profiles need solver.sign = -1");
    if (m.noise.phi.profile == "soliton") e.push_back("noise.phi: soliton is not a noise profile");
    static const std::vector<std::string> envs{"zero", "power", "constant"};
    if (!contains(envs, m.noise.envelope)) e.push_back("noise.envelope: unknown envelope '" + m.noise.envelope + "'");
    if (!(finite(m.noise.gamma) && m.noise.gamma >= 0.0)) e.push_back("noise.gamma: must be nonnegative");
    if (!finite(m.noise.amplitude)) e.push_back("noise.amplitude: must be finite");
    bool energy = false;
    for (const auto& est : m.estimators) {
        if (!contains(known_estimators(), est)) e.push_back("estimators: unknown estimator '" + est + "'");
        energy = energy || is_energy_estimator(est);
    }
    if (energy && s.k % 2 != 0)
        e.push_back("estimators: energy experiments require even k (the energy is sign-definite only for even k), got k = " +
                    std::to_string(s.k));
    static const std::vector<std::string> formats{"csv", "binary", "none"};
    if (!contains(formats, m.trace_format)) e.push_back("trace_format: must be csv, binary or none");
    if (m.output.empty()) e.push_back("output: must not be empty");

    if (m.experiment == "oscint") {
        const OscintSpec& o = m.oscint;
        if (!(o.b > 1.0)) e.push_back("oscint.b: must exceed 1");
        if (o.alphas.empty()) e.push_back("oscint.alphas: must not be empty");
        for (double a : o.alphas)
            if (!(a > -1.0 && a < o.b - 1.0)) e.push_back("oscint.alphas: " + format_double(a) + " outside (-1, b-1)");
        if (o.points < 6) e.push_back("oscint.points: at least 6 sample points");
        if (!(o.x_min >= 100.0)) e.push_back("oscint.x_min: must be >= 100");
        if (!(o.x_max >= 100.0 * o.x_min)) e.push_back("oscint.x_max: must be >= 100 x_min");
        if (o.check_points < 1) e.push_back("oscint.check_points: at least 1");
    }
    if (m.experiment == "probe-kato" || m.experiment == "probe-strichartz") {
        const ProbeSpec& p = m.probe;
        try {
            const Exponent P = Exponent::parse(p.p), Q = Exponent::parse(p.q);
            const Admissibility a = m.experiment == "probe-kato" ? validate_kato(P, Q, p.alpha)
                                                                 : validate_strichartz(P, Q, p.beta);
            if (!a) e.push_back("probe: exponents not admissible: " + a.diagnostic);
        } catch (const std::exception& ex) {
            e.push_back(std::string("probe: ") + ex.what());
        }
        if (p.data < 1) e.push_back("probe.data: at least one datum");
        if (!is_pow2(p.n)) e.push_back("probe.n: must be a power of two >= 8");
        if (!(p.L > 0.0 && p.horizon > 0.0)) e.push_back("probe: L and horizon must be positive");
        if (p.time_samples < 16) e.push_back("probe.time_samples: at least 16");
    }
    if (m.experiment == "ensemble" || m.experiment == "beta") {
        const EnsembleSpec& en = m.ensemble;
        if (en.paths < 2) e.push_back("ensemble.paths: at least 2");
        if (en.shard_count < 1 || en.shard_index >= en.shard_count)
            e.push_back("ensemble: shard_index must be below shard_count");
    }
    if (m.experiment == "ensemble") {
        if (m.estimators.empty()) e.push_back("estimators: ensemble needs at least one estimator");
        const double snap = s.dt * static_cast<double>(std::max<std::size_t>(1, s.stride));
        for (double t : m.ensemble.t_grid)
            if (!(t >= 0.0 && t <= s.horizon * (1.0 + 1e-12) && near_multiple(t, snap)))
                e.push_back("ensemble.t_grid: " + format_double(t) + " is not a snapshot time in [0, horizon]");
    }
    if (m.experiment == "beta") {
        if (m.beta.T.empty()) e.push_back("beta.T: must not be empty");
        for (double T : m.beta.T)
            if (!(T > 0.0 && T <= s.horizon * (1.0 + 1e-12))) e.push_back("beta.T: " + format_double(T) + " outside (0, horizon]");
        if (m.noise.envelope == "zero") w.push_back("beta: noise envelope is zero, all functionals vanish");
    }
    if (m.experiment == "scatter") {
        const ScatterSpec& sc = m.scatter;
        if (sc.paths < 1) e.push_back("scatter.paths: at least 1");
        if (sc.checkpoints.size() < 3) e.push_back("scatter.checkpoints: at least three");
        for (std::size_t i = 0; i < sc.checkpoints.size(); ++i) {
            const double t = sc.checkpoints[i];
            if (!(t > 0.0 && t <= s.horizon * (1.0 + 1e-12))) e.push_back("scatter.checkpoints: " + format_double(t) + " outside (0, horizon]");
            if (i && !(t > sc.checkpoints[i - 1])) e.push_back("scatter.checkpoints: must increase");
        }
        for (double t : sc.v_starts)
            if (!(t >= 0.0 && t < s.horizon)) e.push_back("scatter.v_starts: " + format_double(t) + " outside [0, horizon)");
        if (!(sc.tail_ratio > 0.0 && sc.tail_ratio <= 0.1)) e.push_back("scatter.tail_ratio: must lie in (0, 0.1]");
        if (!(sc.pass_fraction > 0.0 && sc.pass_fraction <= 1.0)) e.push_back("scatter.pass_fraction: must lie in (0, 1]");
        if (m.noise.envelope == "power" && m.noise.gamma <= 2.0 / 3.0)
            w.push_back("noise.gamma = " + format_double(m.noise.gamma) +
                        " is not above 2/3; the scattering statements assume gamma > 2/3");
        if (m.noise.envelope == "constant") e.push_back("scatter: a constant envelope has no finite tail");
        if (e.empty() && s.k == 4) {
            const double n0 = l2_norm(build_profile(m.initial, build_grid(m)));
            if (n0 > sc.small_data * (1.0 + 1e-12))
                e.push_back("initial: |u0|_2 = " + format_double(n0) + " exceeds scatter.small_data = " + format_double(sc.small_data));
        }
    }
}

ParseOutcome parse_manifest(const std::string& text) {
    ParseOutcome out;
    json j;
    try {
        j = parse_strict(text, out.errors);
    } catch (const json::parse_error& ex) {
        out.errors.push_back(std::string("malformed JSON: ") + ex.what());
        return out;
    }
    if (!j.is_object()) {
        out.errors.push_back("manifest must be a JSON object");
        return out;
    }
    Manifest m;
    Reader r(&j, "", out.errors);
    if (!j.contains("schema_version")) out.errors.push_back("schema_version: required");
    r.get("schema_version", m.schema_version);
    if (!j.contains("experiment")) out.errors.push_back("experiment: required");
    r.get("experiment", m.experiment);
    {
        Reader g = r.child("grid");
        g.get("n", m.grid.n);
        g.get("L", m.grid.L);
        g.finish();
    }
    {
        Reader s = r.child("solver");
        s.get("k", m.solver.k);
        s.get("sign", m.solver.sign);
        s.get("dt", m.solver.dt);
        s.get("dealias", m.solver.dealias);
        s.get("horizon", m.solver.horizon);
        s.get("stride", m.solver.stride);
        s.finish();
    }
    read_profile(r.child("initial"), m.initial);
    {
        Reader n = r.child("noise");
        read_profile(n.child("phi"), m.noise.phi);
        n.get("envelope", m.noise.envelope);
        n.get("gamma", m.noise.gamma);
        n.get("amplitude", m.noise.amplitude);
        n.get("seed", m.noise.seed);
        n.finish();
    }
    r.get("estimators", m.estimators);
    {
        Reader o = r.child("oscint");
        o.get("b", m.oscint.b);
        o.get("alphas", m.oscint.alphas);
        o.get("x_min", m.oscint.x_min);
        o.get("x_max", m.oscint.x_max);
        o.get("points", m.oscint.points);
        o.get("check_points", m.oscint.check_points);
        o.finish();
    }
    {
        Reader p = r.child("probe");
        p.get_exponent("p", m.probe.p);
        p.get_exponent("q", m.probe.q);
        p.get("alpha", m.probe.alpha);
        p.get("beta", m.probe.beta);
        p.get("data", m.probe.data);
        p.get("data_seed", m.probe.data_seed);
        p.get("n", m.probe.n);
        p.get("L", m.probe.L);
        p.get("horizon", m.probe.horizon);
        p.get("time_samples", m.probe.time_samples);
        p.finish();
    }
    {
        Reader en = r.child("ensemble");
        en.get("paths", m.ensemble.paths);
        en.get("t_grid", m.ensemble.t_grid);
        en.get("shard_index", m.ensemble.shard_index);
        en.get("shard_count", m.ensemble.shard_count);
        en.finish();
    }
    {
        Reader b = r.child("beta");
        b.get("T", m.beta.T);
        b.finish();
    }
    {
        Reader sc = r.child("scatter");
        sc.get("paths", m.scatter.paths);
        sc.get("checkpoints", m.scatter.checkpoints);
        sc.get("v_starts", m.scatter.v_starts);
        sc.get("small_data", m.scatter.small_data);
        sc.get("tail_ratio", m.scatter.tail_ratio);
        sc.get("pass_fraction", m.scatter.pass_fraction);
        sc.get("final_increment", m.scatter.final_increment);
        sc.finish();
    }
    r.get("trace_format", m.trace_format);
    r.get("output", m.output);
    r.finish();
    check_manifest(m, out.errors, out.warnings);
    if (out.errors.empty()) out.manifest = std::move(m);
    return out;
}

std::string serialize_manifest(const Manifest& m) {
    ojson j;
    j["schema_version"] = m.schema_version;
    j["experiment"] = m.experiment;
    j["grid"] = {{"n", m.grid.n}, {"L", m.grid.L}};
    j["solver"] = {{"k", m.solver.k},           {"sign", m.solver.sign},       {"dt", m.solver.dt},
                   {"dealias", m.solver.dealias}, {"horizon", m.solver.horizon}, {"stride", m.solver.stride}};
    j["initial"] = write_profile(m.initial);
    ojson noise;
    noise["phi"] = write_profile(m.noise.phi);
    noise["envelope"] = m.noise.envelope;
    noise["gamma"] = m.noise.gamma;
    noise["amplitude"] = m.noise.amplitude;
    noise["seed"] = m.noise.seed;
    j["noise"] = noise;
    j["estimators"] = m.estimators;
    j["oscint"] = {{"b", m.oscint.b},         {"alphas", m.oscint.alphas}, {"x_min", m.oscint.x_min},
                   {"x_max", m.oscint.x_max}, {"points", m.oscint.points}, {"check_points", m.oscint.check_points}};
    j["probe"] = {{"p", m.probe.p},       {"q", m.probe.q},
                  {"alpha", m.probe.alpha}, {"beta", m.probe.beta},
                  {"data", m.probe.data}, {"data_seed", m.probe.data_seed},
                  {"n", m.probe.n},       {"L", m.probe.L},
                  {"horizon", m.probe.horizon}, {"time_samples", m.probe.time_samples}};
    j["ensemble"] = {{"paths", m.ensemble.paths},
                     {"t_grid", m.ensemble.t_grid},
                     {"shard_index", m.ensemble.shard_index},
                     {"shard_count", m.ensemble.shard_count}};
    j["beta"] = {{"T", m.beta.T}};
    j["scatter"] = {{"paths", m.scatter.paths},
                    {"checkpoints", m.scatter.checkpoints},
                    {"v_starts", m.scatter.v_starts},
                    {"small_data", m.scatter.small_data},
                    {"tail_ratio", m.scatter.tail_ratio},
                    {"pass_fraction", m.scatter.pass_fraction},
                    {"final_increment", m.scatter.final_increment}};
    j["trace_format"] = m.trace_format;
    j["output"] = m.output;
    return j.dump(2) + "\n";
}

GridPtr build_grid(const Manifest& m) { return make_grid(m.grid.n, m.grid.L); }

SolverConfig build_solver(const Manifest& m, const GridPtr& grid) {
    SolverConfig c;
    c.k = m.solver.k;
    c.sign = m.solver.sign;
    c.dt = m.solver.dt;
    c.dealias = m.solver.dealias;
    c.grid = grid;
    return c;
}

Field build_profile(const ProfileSpec& p, const GridPtr& grid) {
    Field f(grid);
    if (p.profile == "gaussian") {
        f = Field::sample(grid, [&](double x) {
            const double y = x - p.center;
            return p.amplitude * std::exp(-y * y / (2.0 * p.width * p.width)) * std::cos(p.frequency * y);
        });
    } else if (p.profile == "sech") {
        f = Field::sample(grid, [&](double x) { return p.amplitude / std::cosh((x - p.center) / p.width); });
    } else if (p.profile == "soliton") {
        throw InvalidArgument("soliton profiles need the solver degree; use build_initial");
    } else if (p.profile != "zero") {
        throw InvalidArgument("unknown profile '" + p.profile + "'");
    }
    if (p.l2_norm) {
        const double n0 = l2_norm(f);
        if (*p.l2_norm > 0.0) {
            require(n0 > 0.0, "cannot rescale a zero profile to a positive L2 norm");
            for (double& v : f.values) v *= *p.l2_norm / n0;
        } else {
            f = Field(grid);
        }
    }
    return f;
}

NoiseSpec build_noise(const Manifest& m, const GridPtr& grid) {
    NoiseSpec s;
    s.phi = build_profile(m.noise.phi, grid);
    if (m.noise.envelope == "power") s.envelope = Envelope::power(m.noise.gamma, m.noise.amplitude);
    else if (m.noise.envelope == "constant") s.envelope = Envelope::constant(m.noise.amplitude);
    else s.envelope = Envelope::zero();
    s.seed = m.noise.seed;
    return s;
}

}  // namespace sgkdv
