#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "semipos/config.hpp"
#include "semipos/error.hpp"
#include "semipos/nonlinearity.hpp"
#include "semipos/radial.hpp"
#include "semipos/riesz.hpp"
#include "semipos/sweep.hpp"
#include "semipos/weight.hpp"

namespace py = pybind11;
using namespace semipos;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

RadialField field(int dim, double r_max, const Array& values) {
  if (values.ndim() != 1) throw InvalidArgument("expected a 1-d array of nodal values");
  const auto n = static_cast<int>(values.shape(0));
  const RadialGrid grid = make_grid(dim, n, r_max);
  return RadialField(grid, std::vector<double>(values.data(), values.data() + n));
}

py::dict check_dict(const CheckReport& rep) {
  py::dict d;
  d["name"] = rep.name;
  d["passed"] = rep.passed;
  d["detail"] = rep.detail;
  d["witnesses"] = rep.witnesses;
  return d;
}

}  // namespace

PYBIND11_MODULE(_semipos, m) {
  m.doc() = "Radial semipositone biharmonic solver";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("sphere_area", &sphere_area, py::arg("dim"));
  m.def("critical_exponent", &critical_exponent, py::arg("dim"));

  m.def(
      "grid_nodes", [](int dim, int n, double r_max) { return to_array(make_grid(dim, n, r_max).nodes()); },
      py::arg("dim"), py::arg("n"), py::arg("r_max"));
  m.def(
      "volume_weights",
      [](int dim, int n, double r_max) { return to_array(make_grid(dim, n, r_max).volume_weights()); },
      py::arg("dim"), py::arg("n"), py::arg("r_max"));
  m.def(
      "integrate", [](int dim, double r_max, const Array& u) { return integrate(field(dim, r_max, u)); },
      py::arg("dim"), py::arg("r_max"), py::arg("u"));
  m.def(
      "laplacian",
      [](int dim, double r_max, const Array& u) { return to_array(laplacian(field(dim, r_max, u)).values()); },
      py::arg("dim"), py::arg("r_max"), py::arg("u"));

  m.def("ring_kernel_value", &ring_kernel_value, py::arg("dim"), py::arg("alpha"), py::arg("r"), py::arg("s"));
  m.def("weak_lp_profile", &weak_lp_profile, py::arg("dim"), py::arg("alpha"));
  m.def(
      "riesz_solve",
      [](int dim, double r_max, const Array& h) {
        const RadialField src = field(dim, r_max, h);
        const RieszOperator op(src.grid());
        const RieszSolution sol = riesz_solve(op, src);
        return py::make_tuple(to_array(sol.u.values()), to_array(sol.neg_lap.values()));
      },
      py::arg("dim"), py::arg("r_max"), py::arg("h"), "Returns (u, -Lap u) for Lap^2 u = h.");

  py::class_<NonlinearitySpec>(m, "Nonlinearity")
      .def_static("paper_example", &NonlinearitySpec::paper_example, py::arg("dim"), py::arg("gamma") = 2.5,
                  py::arg("c_f") = 1.0, py::arg("r_mono") = 1.0)
      .def_static("power", &NonlinearitySpec::power, py::arg("dim"), py::arg("coef"), py::arg("p"),
                  py::arg("gamma"), py::arg("c_f") = 1.0, py::arg("r_mono") = 1.0)
      .def_property_readonly("name", &NonlinearitySpec::name)
      .def_property_readonly("dim", &NonlinearitySpec::dim)
      .def_property_readonly("gamma", &NonlinearitySpec::gamma)
      .def("f", &NonlinearitySpec::f, py::arg("t"))
      .def("F", &NonlinearitySpec::F, py::arg("t"))
      .def("df", &NonlinearitySpec::df, py::arg("t"))
      .def(
          "checks",
          [](const NonlinearitySpec& spec) {
            const auto s = default_samples();
            py::list out;
            for (const CheckReport& rep : {check_f1(spec, s), check_f2(spec, s), check_f3(spec, s),
                                           check_f4(spec, s)}) {
              out.append(check_dict(rep));
            }
            return out;
          },
          "Sample-based reports for (f1)-(f4).");

  py::class_<ShiftedNonlinearity>(m, "Shifted")
      .def(py::init<NonlinearitySpec, double>(), py::arg("base"), py::arg("a"))
      .def_property_readonly("a", &ShiftedNonlinearity::a)
      .def("fa", &ShiftedNonlinearity::fa, py::arg("t"))
      .def("Fa", &ShiftedNonlinearity::Fa, py::arg("t"));
  m.def("check_primitive_gap", &check_primitive_gap, py::arg("shifted"), py::arg("s"), py::arg("t"));

  py::class_<WeightSpec>(m, "Weight")
      .def_static("example", &WeightSpec::example, py::arg("dim"), py::arg("d"), py::arg("r_in"),
                  py::arg("r_out"))
      .def("__call__", &WeightSpec::operator(), py::arg("r"))
      .def_property_readonly("r_in", &WeightSpec::r_in)
      .def_property_readonly("r_out", &WeightSpec::r_out)
      .def(
          "g2",
          [](const WeightSpec& w, double delta) {
            const G2Report rep = check_g2(w, delta, default_g2_samples());
            py::dict d;
            d["passed"] = rep.passed;
            d["c_g"] = rep.c_g;
            d["limit"] = rep.limit;
            d["samples"] = rep.samples;
            return d;
          },
          py::arg("delta"));

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("a", &SweepRow::a)
      .def_readonly("level", &SweepRow::level)
      .def_readonly("norm_h2", &SweepRow::norm_h2)
      .def_readonly("sup_norm", &SweepRow::sup_norm)
      .def_readonly("min_value", &SweepRow::min_value)
      .def_readonly("rel_residual", &SweepRow::rel_residual)
      .def_readonly("converged", &SweepRow::converged)
      .def_readonly("limit_sup_distance", &SweepRow::limit_sup_distance)
      .def_readonly("identity_gap", &SweepRow::identity_gap)
      .def_readonly("status", &SweepRow::status);

  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("rows", &SweepReport::rows)
      .def_property_readonly("radii", [](const SweepReport& r) { return to_array(r.radii); })
      .def("profile", [](const SweepReport& r, std::size_t k) { return to_array(r.profiles.at(k)); })
      .def("summary_json", [](const SweepReport& r) { return to_json(r.summary).dump(); })
      .def("geometry_json",
           [](const SweepReport& r) { return r.geometry ? to_json(*r.geometry).dump() : std::string("null"); })
      .def("emit", &emit, py::arg("dir"));

  m.def(
      "config_json", [](const std::string& text) { return to_json(parse_config_string(text)).dump(); },
      py::arg("text"), "Parse and validate INI text; returns the resolved config as JSON.");
  m.def(
      "run_sweep",
      [](const std::string& text) {
        const Config c = parse_config_string(text);
        py::gil_scoped_release release;
        return run_sweep(c);
      },
      py::arg("text"));
}
