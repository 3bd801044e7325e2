#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gmink/body.hpp"
#include "gmink/config.hpp"
#include "gmink/error.hpp"
#include "gmink/flow.hpp"
#include "gmink/gaussmeas.hpp"
#include "gmink/newton.hpp"
#include "gmink/verify.hpp"

namespace py = pybind11;
using namespace gmink;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ScalarField to_field(const GridPtr& grid, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != grid->size())
    throw Error(ErrorCode::InvalidArgument, "expected a 1-d array with one value per grid node");
  return ScalarField(grid, std::vector<double>(a.data(), a.data() + a.shape(0)));
}

}  // namespace

PYBIND11_MODULE(_gmink, m) {
  m.doc() = "Gaussian Minkowski problem solvers";

  static py::exception<Error> error(m, "GminkError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<DirectionGrid, std::shared_ptr<DirectionGrid>>(m, "Grid")
      .def_property_readonly("dim", &DirectionGrid::dim)
      .def_property_readonly("resolution", &DirectionGrid::resolution)
      .def_property_readonly("size", &DirectionGrid::size)
      .def_property_readonly("area", &DirectionGrid::area)
      .def_property_readonly("weights", [](const DirectionGrid& g) { return to_array(g.weights()); })
      .def_property_readonly("nodes", [](const DirectionGrid& g) {
        py::array_t<double> out({static_cast<py::ssize_t>(g.size()), py::ssize_t{3}});
        auto r = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < g.size(); ++i)
          for (int k = 0; k < 3; ++k) r(static_cast<py::ssize_t>(i), k) = g.node(i)[k];
        return out;
      });

  m.def("make_grid", [](int dim, int resolution) {
    return std::const_pointer_cast<DirectionGrid>(make_grid(dim, resolution));
  }, py::arg("dim"), py::arg("resolution"));

  py::class_<SupportField>(m, "Body")
      .def_property_readonly("values", [](const SupportField& h) { return to_array(h.h().values()); })
      .def_property_readonly("min_eig", &SupportField::min_eig);

  m.def("support", [](const std::shared_ptr<DirectionGrid>& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
    return require_convex(to_field(g, v));
  }, py::arg("grid"), py::arg("values"), "Validate support values as a convex body.");
  m.def("ball", [](const std::shared_ptr<DirectionGrid>& g, double r) { return ball(g, r); },
        py::arg("grid"), py::arg("radius"));

  py::class_<MeasureSpec>(m, "Measure")
      .def_static("constant", [](const std::shared_ptr<DirectionGrid>& g, double v) { return MeasureSpec::constant(g, v); },
                  py::arg("grid"), py::arg("value"))
      .def_static("fourier",
                  [](const std::shared_ptr<DirectionGrid>& g, double total, std::vector<double> c, std::vector<double> s) {
                    return MeasureSpec::fourier(g, total, c, s);
                  },
                  py::arg("grid"), py::arg("total"), py::arg("cos") = std::vector<double>{},
                  py::arg("sin") = std::vector<double>{})
      .def_static("ball_density", [](const std::shared_ptr<DirectionGrid>& g, double r) { return MeasureSpec::ball_density(g, r); },
                  py::arg("grid"), py::arg("radius"))
      .def_static("from_density",
                  [](const std::shared_ptr<DirectionGrid>& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
                    return MeasureSpec(to_field(g, v), "array");
                  },
                  py::arg("grid"), py::arg("density"))
      .def_property_readonly("density", [](const MeasureSpec& mu) { return to_array(mu.density().values()); })
      .def_property_readonly("total", &MeasureSpec::total)
      .def("scaled", &MeasureSpec::scaled);

  m.def("gaussian_volume", py::overload_cast<const SupportField&>(&gaussian_volume));
  m.def("surface_density", [](const SupportField& h) { return to_array(surface_density(h).values()); });
  m.def("total_measure", &total_measure);
  m.def("tau", py::overload_cast<const SupportField&, const MeasureSpec&>(&tau));
  m.def("functional_F", &functional_F);
  m.def("flow_residual", &flow_residual);
  m.def("constant_root", &constant_root, py::arg("c0"), py::arg("dim"));
  m.def("ball_gaussian_volume", &ball_gaussian_volume, py::arg("dim"), py::arg("radius"));

  py::class_<FlowConfig>(m, "FlowConfig")
      .def(py::init<>())
      .def_readwrite("dt_init", &FlowConfig::dt_init)
      .def_readwrite("dt_control", &FlowConfig::dt_control)
      .def_readwrite("t_max", &FlowConfig::t_max)
      .def_readwrite("residual_tol", &FlowConfig::residual_tol)
      .def_readwrite("drift_tol", &FlowConfig::drift_tol)
      .def_readwrite("max_steps", &FlowConfig::max_steps);

  py::class_<HomotopyConfig>(m, "HomotopyConfig")
      .def(py::init<>())
      .def_readwrite("c0", &HomotopyConfig::c0)
      .def_readwrite("t_steps", &HomotopyConfig::t_steps)
      .def_readwrite("newton_tol", &HomotopyConfig::newton_tol)
      .def_readwrite("max_newton", &HomotopyConfig::max_newton);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("solver", &SolveReport::solver)
      .def_property_readonly("status", [](const SolveReport& r) { return to_string(r.status); })
      .def_readonly("message", &SolveReport::message)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("residual", &SolveReport::residual)
      .def_readonly("gamma", &SolveReport::gamma)
      .def_readonly("tau", &SolveReport::tau)
      .def_readonly("t_final", &SolveReport::t_final)
      .def_readonly("body", &SolveReport::body)
      .def_property_readonly("ok", &SolveReport::ok)
      .def("to_json", [](const SolveReport& r) { return report_json(r); });

  m.def("run_flow", py::overload_cast<const MeasureSpec&, const FlowConfig&>(&run_flow),
        py::arg("measure"), py::arg("config") = FlowConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("solve", &solve_gaussian_minkowski, py::arg("measure"), py::arg("config") = HomotopyConfig{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("dim", &RunConfig::dim)
      .def_readwrite("resolution", &RunConfig::resolution)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("solver", &RunConfig::solver);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("base_dir") = std::filesystem::path{});
  m.def("verify_json", [](const RunConfig& cfg) {
    VerifyReport r;
    {
      py::gil_scoped_release release;
      r = run_verify(cfg);
    }
    return verify_json(r);
  }, py::arg("config"));
}
