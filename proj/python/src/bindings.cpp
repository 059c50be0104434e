#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nflow/diagnostics.hpp"
#include "nflow/errors.hpp"
#include "nflow/evolution.hpp"
#include "nflow/experiments.hpp"
#include "nflow/io.hpp"
#include "nflow/spectral.hpp"
#include "nflow/steady_states.hpp"

namespace py = pybind11;
using nlohmann::ordered_json;

namespace {

py::object to_py(const ordered_json& j) {
    switch (j.type()) {
        case ordered_json::value_t::null: return py::none();
        case ordered_json::value_t::boolean: return py::bool_(j.get<bool>());
        case ordered_json::value_t::number_integer: return py::int_(j.get<long long>());
        case ordered_json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case ordered_json::value_t::number_float: return py::float_(j.get<double>());
        case ordered_json::value_t::string: return py::str(j.get<std::string>());
        case ordered_json::value_t::array: {
            py::list l;
            for (const auto& v : j) l.append(to_py(v));
            return l;
        }
        default: {
            py::dict d;
            for (const auto& [k, v] : j.items()) d[py::str(k)] = to_py(v);
            return d;
        }
    }
}

nflow::SolverConfig solver_config(const py::dict& kw) {
    nflow::RunConfig rc;
    for (const auto& [k, v] : kw) {
        const std::string key = py::str(k);
        std::string value = py::str(v);
        if (py::isinstance<py::bool_>(v)) value = v.cast<bool>() ? "true" : "false";
        nflow::apply_config_key(rc, key, value);
    }
    return rc.solver;
}

py::dict record_dict(const nflow::DiagnosticsRecord& r) {
    py::dict d;
    d["step"] = r.step;
    d["t"] = r.t;
    d["dt"] = r.dt;
    d["E"] = r.energy;
    d["I"] = r.conserved;
    d["ubar"] = r.mean;
    d["min_u"] = r.min_u;
    d["max_u"] = r.max_u;
    d["residual_inf"] = r.residual_inf;
    d["dissipation"] = r.dissipation ? py::object(py::float_(*r.dissipation)) : py::none();
    d["lyapunov"] = r.lyapunov;
    d["closure"] = r.closure ? py::object(py::float_(*r.closure)) : py::none();
    return d;
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral solver for u_t = u^p (u_xx + u - mean u) with Neumann ends";

    auto base = py::register_exception<nflow::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<nflow::InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<nflow::NonPositiveField>(m, "NonPositiveField", base.ptr());
    py::register_exception<nflow::DomainNotMultipleOfPi>(m, "DomainNotMultipleOfPi", base.ptr());
    py::register_exception<nflow::ExponentOutOfRange>(m, "ExponentOutOfRange", base.ptr());
    py::register_exception<nflow::NoRoot>(m, "NoRoot", base.ptr());
    py::register_exception<nflow::StepCollapse>(m, "StepCollapse", base.ptr());
    py::register_exception<nflow::ConfigError>(m, "ConfigError", base.ptr());

    m.attr("pi") = nflow::kPi;

    py::class_<nflow::Field>(m, "Field")
        .def_static("from_values",
                    [](double a, const std::vector<double>& v) {
                        return nflow::Field::from_values(
                            nflow::make_grid(a, static_cast<int>(v.size())), v);
                    },
                    py::arg("a"), py::arg("values"))
        .def_static("from_coeffs",
                    [](double a, const std::vector<double>& c) {
                        return nflow::from_coeffs(c, nflow::make_grid(a, static_cast<int>(c.size())));
                    },
                    py::arg("a"), py::arg("coeffs"))
        .def_static("from_u0",
                    [](double a, int n, const std::string& u0) {
                        return nflow::parse_u0(u0).build(nflow::make_grid(a, n));
                    },
                    py::arg("a"), py::arg("n"), py::arg("u0"),
                    "u0 given as \"c0 k1:c1 k2:c2 ...\"")
        .def_static("constant",
                    [](double a, int n, double c) {
                        return nflow::Field::constant(nflow::make_grid(a, n), c);
                    },
                    py::arg("a"), py::arg("n"), py::arg("c"))
        .def_property_readonly("a", [](const nflow::Field& f) { return f.grid().length(); })
        .def_property_readonly("n", &nflow::Field::size)
        .def_property_readonly("nodes", [](const nflow::Field& f) { return to_vec(f.grid().nodes()); })
        .def_property_readonly("values", [](const nflow::Field& f) { return to_vec(f.values()); })
        .def_property_readonly("coeffs", [](const nflow::Field& f) { return to_vec(f.coeffs()); })
        .def("min", &nflow::Field::min)
        .def("max", &nflow::Field::max)
        .def("__len__", &nflow::Field::size);

    m.def("energy", &nflow::energy, py::arg("f"));
    m.def("conserved_integral", &nflow::conserved_integral, py::arg("f"), py::arg("p"));
    m.def("lyapunov", &nflow::lyapunov, py::arg("f"), py::arg("p"));
    m.def("closure_integral",
          [](const nflow::Field& f, double p) { return nflow::closure_integral(f, p); },
          py::arg("f"), py::arg("p"));
    m.def("rhs", &nflow::rhs, py::arg("f"), py::arg("p"));
    m.def("ls_constant", &nflow::ls_constant, py::arg("a"));
    m.def("ls_check", [](const nflow::Field& f) {
        const auto c = nflow::ls_check(f);
        py::dict d;
        d["lhs"] = c.lhs;
        d["rhs"] = c.rhs;
        d["holds"] = c.holds;
        return d;
    }, py::arg("f"));

    m.def("classify",
          [](double a, double p) { return to_py(nflow::to_json(nflow::classify(a, p))); },
          py::arg("a"), py::arg("p"));
    m.def("cosine_family_integral", &nflow::cosine_family_integral, py::arg("A"), py::arg("B"),
          py::arg("p"), py::arg("k"));
    m.def("compute_A0", &nflow::compute_A0, py::arg("p"), py::arg("k"), py::arg("I0"));
    m.def("solve_BA", &nflow::solve_BA, py::arg("A"), py::arg("p"), py::arg("k"), py::arg("I0"));
    m.def("predict_limit",
          [](const nflow::Field& f, double p) {
              return to_py(nflow::to_json(nflow::predict_limit(f, p)));
          },
          py::arg("f"), py::arg("p"));
    m.def("match_steady_state",
          [](const nflow::Field& f, double fit_tol) {
              const auto mt = nflow::match_steady_state(f, fit_tol);
              py::dict d;
              d["state"] = mt.state ? to_py(nflow::to_json(*mt.state)) : py::none();
              d["residual"] = mt.residual;
              d["A_fit"] = mt.A_fit;
              d["B_fit"] = mt.B_fit;
              return d;
          },
          py::arg("f"), py::arg("fit_tol") = nflow::kDefaultFitTol);

    m.def("simulate",
          [](const nflow::Field& u0, const py::dict& config) {
              const nflow::SolverConfig cfg = solver_config(config);
              std::optional<nflow::SimOutcome> res;
              {
                  py::gil_scoped_release release;
                  res.emplace(nflow::simulate(u0, cfg));
              }
              const nflow::SimOutcome& out = *res;
              py::dict d;
              d["outcome"] = nflow::outcome_name(out.tag);
              if (const auto* c = std::get_if<nflow::Converged>(&out.tag)) {
                  d["t_end"] = c->t;
                  d["fit"] = c->fit.state ? to_py(nflow::to_json(*c->fit.state)) : py::none();
              } else if (const auto* b = std::get_if<nflow::Blowup>(&out.tag)) {
                  d["t_end"] = b->t_estimate;
                  d["trigger"] = nflow::trigger_name(b->trigger);
              } else {
                  d["t_end"] = std::get<nflow::Undecided>(out.tag).t_end;
              }
              py::list trace;
              for (const auto& r : out.trace) trace.append(record_dict(r));
              d["trace"] = trace;
              d["final"] = out.final_field;
              d["steps"] = out.steps;
              d["rejections"] = out.rejections;
              d["I0"] = out.conserved_initial;
              return d;
          },
          py::arg("u0"), py::arg("config") = py::dict());

    m.def("reconstruct_curve",
          [](const nflow::Field& f, double p, int samples) {
              const auto c = nflow::reconstruct_curve(f, p, samples);
              py::dict d;
              d["points"] = c.points;
              d["gap_x"] = c.gap_x;
              d["gap_y"] = c.gap_y;
              d["gap"] = c.gap;
              d["length"] = c.length;
              return d;
          },
          py::arg("f"), py::arg("p"), py::arg("samples") = 1025);

    m.def("run_ls_suite",
          [](const std::vector<double>& a_list, int trials, std::uint64_t seed, int n) {
              return to_py(nflow::to_json(nflow::run_ls_suite(a_list, trials, seed, n)));
          },
          py::arg("a_list"), py::arg("trials"), py::arg("seed"), py::arg("n") = 129);

    m.def("single_mode_energy", &nflow::single_mode_energy, py::arg("a"), py::arg("amp"));
}
