#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgkdv/error.hpp"
#include "sgkdv/estimates.hpp"
#include "sgkdv/manifest.hpp"
#include "sgkdv/noise.hpp"
#include "sgkdv/oscillatory.hpp"
#include "sgkdv/run.hpp"
#include "sgkdv/solver.hpp"
#include "sgkdv/spectral.hpp"

namespace py = pybind11;
using namespace sgkdv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field to_field(const Array& a, double L) {
    require(a.ndim() == 1, "expected a 1-d array");
    const GridPtr g = make_grid(static_cast<std::size_t>(a.size()), L);
    return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Array trace_array(const SpaceTimeTrace& tr) {
    Array out({static_cast<py::ssize_t>(tr.size()), static_cast<py::ssize_t>(tr.grid()->n())});
    std::copy(tr.data().begin(), tr.data().end(), out.mutable_data());
    return out;
}

Envelope make_envelope(const std::string& kind, double gamma, double amplitude) {
    if (kind == "power") return Envelope::power(gamma, amplitude);
    if (kind == "constant") return Envelope::constant(amplitude);
    if (kind == "zero") return Envelope::zero();
    throw InvalidArgument("envelope must be power, constant or zero");
}


}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "stochastic generalized KdV numerical lab";

    // later registrations are tried first, so the base class goes first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_ArithmeticError);

    m.def("grid_points", [](std::size_t n, double L) { return to_array(make_grid(n, L)->points()); }, py::arg("n"),
          py::arg("L"));
    m.def("grid_frequencies", [](std::size_t n, double L) { return to_array(make_grid(n, L)->frequencies()); },
          py::arg("n"), py::arg("L"));

    m.def("airy_propagate", [](const Array& u, double L, double t) { return to_array(airy_propagate(to_field(u, L), t).values); },
          py::arg("u"), py::arg("L"), py::arg("t"));
    m.def("fractional_derivative",
          [](const Array& u, double L, double alpha, bool homogeneous) {
              return to_array(fractional_derivative(to_field(u, L), alpha,
                                                    homogeneous ? DerivativeKind::homogeneous : DerivativeKind::inhomogeneous,
                                                    ZeroMode::zero_out)
                                  .values);
          },
          py::arg("u"), py::arg("L"), py::arg("alpha"), py::arg("homogeneous") = true);
    m.def("sobolev_norm", [](const Array& u, double L, double s) { return sobolev_norm(to_field(u, L), s); },
          py::arg("u"), py::arg("L"), py::arg("s"));
    m.def("mass", [](const Array& u, double L) { return mass(to_field(u, L)); }, py::arg("u"), py::arg("L"));
    m.def("energy", [](const Array& u, double L, int k, int sign) { return energy(to_field(u, L), k, sign); },
          py::arg("u"), py::arg("L"), py::arg("k") = 4, py::arg("sign") = 1);

    m.def("osc_integral_I",
          [](double b, double alpha, double x) {
              const OscResult r = osc_integral_I({b, alpha, x, std::nullopt});
              return py::make_tuple(r.value, r.abs_error);
          },
          py::arg("b"), py::arg("alpha"), py::arg("x"));
    m.def("osc_integral_J",
          [](double b, double alpha, double x) {
              const OscResult r = osc_integral_J({b, alpha, x, std::nullopt});
              return py::make_tuple(r.value, r.abs_error);
          },
          py::arg("b"), py::arg("alpha"), py::arg("x"));
    m.def("predicted_exponent",
          [](double b, double alpha, const std::string& branch) {
              return predicted_exponent(b, alpha, branch_from_string(branch));
          },
          py::arg("b"), py::arg("alpha"), py::arg("branch"));
    m.def("airy_reference", &airy_reference, py::arg("x"));

    m.def("validate_kato",
          [](const std::string& p, const std::string& q, double alpha) {
              const Admissibility a = validate_kato(Exponent::parse(p), Exponent::parse(q), alpha);
              return py::make_tuple(a.ok, a.diagnostic);
          },
          py::arg("p"), py::arg("q"), py::arg("alpha"));
    m.def("validate_strichartz",
          [](const std::string& p, const std::string& q, double beta) {
              const Admissibility a = validate_strichartz(Exponent::parse(p), Exponent::parse(q), beta);
              return py::make_tuple(a.ok, a.diagnostic);
          },
          py::arg("p"), py::arg("q"), py::arg("beta"));

    m.def("sample_path", [](std::uint64_t seed, double dt, std::size_t steps) { return to_array(sample_path(seed, dt, steps).increments); },
          py::arg("seed"), py::arg("dt"), py::arg("steps"));
    m.def("soliton",
          [](int k, double c, double x0, std::size_t n, double L) { return to_array(soliton(k, c, x0, make_grid(n, L)).values); },
          py::arg("k"), py::arg("c"), py::arg("x0"), py::arg("n"), py::arg("L"));

    m.def("simulate",
          [](const Array& u0, double L, int k, int sign, double dt, std::size_t steps, std::size_t stride,
             std::optional<Array> phi, const std::string& envelope, double gamma, double amplitude, std::uint64_t seed) {
              const Field u = to_field(u0, L);
              SolverConfig cfg;
              cfg.grid = u.grid;
              cfg.k = k;
              cfg.sign = sign;
              cfg.dt = dt;
              SimulationRequest req;
              req.steps = steps;
              req.stride = stride;
              NoiseSpec ns;
              BrownianPath path;
              if (phi) {
                  ns.phi = Field(u.grid, std::vector<double>(phi->data(), phi->data() + phi->size()));
                  require(ns.phi.size() == u.size(), "phi must have the same length as u0");
                  ns.envelope = make_envelope(envelope, gamma, amplitude);
                  path = sample_path(seed, dt, steps);
                  req.noise = &ns;
                  req.path = &path;
              }
              SimulationResult r;
              {
                  py::gil_scoped_release release;
                  r = simulate(u, cfg, req);
              }
              py::dict d;
              d["t"] = to_array(r.trace.times());
              d["u"] = trace_array(r.trace);
              d["mass"] = to_array(r.mass);
              d["energy"] = to_array(r.energy);
              return d;
          },
          py::arg("u0"), py::arg("L"), py::arg("k") = 4, py::arg("sign") = 1, py::arg("dt") = 1e-3,
          py::arg("steps") = 1000, py::arg("stride") = 1, py::arg("phi") = py::none(), py::arg("envelope") = "power",
          py::arg("gamma") = 0.7, py::arg("amplitude") = 1.0, py::arg("seed") = 0);

    m.def("parse_manifest",
          [](const std::string& text) {
              const ParseOutcome p = parse_manifest(text);
              py::dict d;
              d["ok"] = p.ok();
              d["errors"] = p.errors;
              d["warnings"] = p.warnings;
              d["resolved"] = p.ok() ? py::object(py::str(serialize_manifest(*p.manifest))) : py::object(py::none());
              return d;
          },
          py::arg("text"));
    m.def("run_manifest",
          [](const std::string& text, std::optional<std::string> out, std::optional<std::uint64_t> seed, unsigned jobs) {
              RunOptions opt;
              opt.out = std::move(out);
              opt.seed = seed;
              opt.jobs = jobs;
              RunResult r;
              {
                  py::gil_scoped_release release;
                  r = run_text(text, opt);
              }
              py::list gates;
              for (const auto& g : r.gates) gates.append(py::make_tuple(g.name, g.passed, g.detail));
              py::dict d;
              d["exit_code"] = r.exit_code;
              d["gates"] = gates;
              d["errors"] = r.errors;
              d["warnings"] = r.warnings;
              d["out_dir"] = r.out_dir.string();
              return d;
          },
          py::arg("text"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("jobs") = 1);
}
