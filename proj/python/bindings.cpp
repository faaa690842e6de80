#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "pbe_djm/cli_reports.hpp"
#include "pbe_djm/djm_engine.hpp"
#include "pbe_djm/error.hpp"
#include "pbe_djm/exact_solutions.hpp"
#include "pbe_djm/numerical_oracle.hpp"

namespace py = pybind11;

// Rationals cross the boundary as fractions.Fraction. On the way in, int,
// Fraction and strings such as "3/8" or "0.125" are accepted.
namespace pybind11::detail {
template <>
struct type_caster<pbe::Rational> {
  PYBIND11_TYPE_CASTER(pbe::Rational, const_name("fractions.Fraction"));

  bool load(handle src, bool) {
    if (!src) return false;
    try {
      if (py::isinstance<py::str>(src)) {
        value = pbe::parse_rational(src.cast<std::string>());
        return true;
      }
      if (py::isinstance<py::float_>(src)) return false;
      if (!py::hasattr(src, "numerator") || !py::hasattr(src, "denominator")) return false;
      const std::string num = py::str(src.attr("numerator"));
      const std::string den = py::str(src.attr("denominator"));
      value = pbe::Rational(pbe::Integer(num, 10), pbe::Integer(den, 10));
      value.canonicalize();
      return true;
    } catch (const pbe::Error&) {
      return false;
    }
  }

  static handle cast(const pbe::Rational& q, return_value_policy, handle) {
    static py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(py::int_(py::str(q.get_num().get_str())), py::int_(py::str(q.get_den().get_str())))
        .release();
  }
};
}  // namespace pybind11::detail

namespace {

py::dict point(const pbe::PointValue& v) {
  py::dict d;
  d["smooth"] = v.smooth;
  d["dirac"] = v.dirac_coefficient;
  return d;
}

py::dict poly_dict(const pbe::TPoly& p) {
  py::dict d;
  for (const auto& [key, c] : p.coeffs()) d[py::make_tuple(key.first, key.second)] = py::cast(c);
  return d;
}

pbe::Aggregation aggregation_of(const std::string& name) {
  if (name == "none") return pbe::Aggregation::None;
  if (name == "constant") return pbe::Aggregation::ConstantUnit;
  throw pbe::Error(pbe::ErrorCode::InvalidArgument, "aggregation must be 'none' or 'constant', got " + name);
}

py::list tables(const std::vector<pbe::CsvTable>& ts) {
  py::list out;
  for (const auto& t : ts) out.append(py::make_tuple(t.name, t.to_csv()));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact series and grid solvers for the breakage and aggregation-breakage equations";

  static py::exception<pbe::Error> error(m, "PbeError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const pbe::Error& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      exc.attr("code") = std::string(pbe::to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<pbe::Term>(m, "Term")
      .def_readonly("coeff", &pbe::Term::coeff)
      .def_readonly("t_pow", &pbe::Term::t_pow)
      .def_readonly("u_pow", &pbe::Term::u_pow)
      .def_readonly("r_pow", &pbe::Term::r_pow)
      .def_readonly("exp_rate", &pbe::Term::exp_rate)
      .def_property_readonly("dist", [](const pbe::Term& t) {
        switch (t.dist) {
          case pbe::DistFactor::DiracAtR: return "dirac";
          case pbe::DistFactor::ThetaBelowR: return "theta";
          default: return "one";
        }
      });

  py::class_<pbe::Expr>(m, "Expr")
      .def_property_readonly("terms", &pbe::Expr::terms)
      .def("__len__", &pbe::Expr::size)
      .def("__str__", &pbe::Expr::to_string)
      .def("__repr__", [](const pbe::Expr& e) { return "Expr(" + e.to_string() + ")"; })
      .def("__eq__", [](const pbe::Expr& a, const pbe::Expr& b) { return a == b; })
      .def("__add__", &pbe::add)
      .def("__sub__", &pbe::subtract)
      .def("scale", &pbe::scale)
      .def("evaluate",
           [](const pbe::Expr& e, const pbe::Rational& t, const pbe::Rational& u,
              std::optional<pbe::Rational> r) { return point(pbe::evaluate(e, t, u, r)); },
           py::arg("t"), py::arg("u"), py::arg("r") = py::none())
      .def("total_moment", [](const pbe::Expr& e, unsigned j) { return poly_dict(pbe::total_moment(e, j)); })
      .def("tail_integral", &pbe::tail_integral, py::arg("w") = 0)
      .def("time_antiderivative", &pbe::time_antiderivative)
      .def("dirac_coefficient", [](const pbe::Expr& e) { return poly_dict(pbe::dirac_coefficient(e)); });

  m.def("parse_initial", [](const std::string& s) { return pbe::parse_initial(s); });
  m.def("convolve", &pbe::convolve);

  py::class_<pbe::ProblemSpec>(m, "Problem")
      .def_readonly("selection_power", &pbe::ProblemSpec::selection_power)
      .def_readonly("initial", &pbe::ProblemSpec::initial)
      .def_readonly("has_radius", &pbe::ProblemSpec::has_radius)
      .def_property_readonly("aggregation", [](const pbe::ProblemSpec& p) {
        return p.aggregation == pbe::Aggregation::None ? "none" : "constant";
      });

  m.def("example_problem", &pbe::example_problem, py::arg("example_id"));
  m.def(
      "make_problem",
      [](unsigned k, const std::string& aggregation, const std::string& initial) {
        return pbe::make_problem(k, aggregation_of(aggregation), pbe::parse_initial(initial));
      },
      py::arg("selection_power"), py::arg("aggregation"), py::arg("initial"));

  py::class_<pbe::SeriesSolution>(m, "Series")
      .def_readonly("components", &pbe::SeriesSolution::components)
      .def_readonly("partial_sums", &pbe::SeriesSolution::partial_sums)
      .def_property_readonly("order", &pbe::SeriesSolution::order)
      .def("phi", &pbe::SeriesSolution::phi, py::return_value_policy::reference_internal)
      .def(
          "extend",
          [](pbe::SeriesSolution& s, std::size_t n, std::size_t term_cap) {
            py::gil_scoped_release release;
            pbe::extend_series(s, n, {term_cap});
          },
          py::arg("n"), py::arg("term_cap") = pbe::SeriesOptions{}.term_cap);

  m.def(
      "compute_series",
      [](const pbe::ProblemSpec& spec, std::size_t n, std::size_t term_cap) {
        py::gil_scoped_release release;
        return pbe::compute_series(spec, n, {term_cap});
      },
      py::arg("problem"), py::arg("n"), py::arg("term_cap") = pbe::SeriesOptions{}.term_cap);
  m.def("closed_form_term", &pbe::closed_form_term, py::arg("example_id"), py::arg("m"));

  m.def(
      "eval_exact",
      [](int id, double t, double u, std::optional<double> r) { return point(pbe::eval_exact({id, r}, t, u)); },
      py::arg("example_id"), py::arg("t"), py::arg("u"), py::arg("r") = py::none());
  m.def(
      "exact_moment",
      [](int id, unsigned j, double t, std::optional<double> r) { return pbe::exact_moment({id, r}, j, t); },
      py::arg("example_id"), py::arg("j"), py::arg("t"), py::arg("r") = py::none());

  py::class_<pbe::GridState>(m, "Grid")
      .def_readonly("nodes", &pbe::GridState::nodes)
      .def_readonly("density", &pbe::GridState::density)
      .def_readonly("time", &pbe::GridState::time)
      .def_readonly("max_mass_drift", &pbe::GridState::max_mass_drift)
      .def_readonly("leak_bound", &pbe::GridState::leak_bound)
      .def("moment", &pbe::GridState::moment)
      .def("interpolate", &pbe::GridState::interpolate);

  m.def(
      "solve_grid",
      [](const pbe::ProblemSpec& spec, double t_final, double u_max, std::size_t cells, double dt) {
        py::gil_scoped_release release;
        return pbe::advance(pbe::init_grid(u_max, cells, spec.initial), spec, dt, t_final);
      },
      py::arg("problem"), py::arg("t_final"), py::arg("u_max") = 20.0, py::arg("cells") = 2000,
      py::arg("dt") = 1e-3);

  m.def(
      "run_case",
      [](const std::string& text) {
        const pbe::CaseConfig config = pbe::parse_config(text);
        std::vector<pbe::CsvTable> all;
        {
          py::gil_scoped_release release;
          for (auto kind : config.outputs) {
            auto ts = pbe::run_output(config, kind);
            all.insert(all.end(), ts.begin(), ts.end());
          }
        }
        return tables(all);
      },
      py::arg("config_text"), "Runs every output listed in a key = value case and returns (name, csv) pairs.");
  m.def("canonical_config", [](int id) { return pbe::emit_config(pbe::canonical_config(id)); });
}
