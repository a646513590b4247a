#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homcell/errors.hpp"
#include "homcell/expression.hpp"
#include "homcell/fixed_points.hpp"
#include "homcell/index.hpp"
#include "homcell/map_model.hpp"
#include "homcell/scenario.hpp"

namespace py = pybind11;
using namespace homcell;

namespace {

SmoothPlanarMap map_from_text(const std::string& spec) { return map_from_json(Json::parse(spec)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "homcell core bindings";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> error(m, "HomcellError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("zoo", [] {
    std::vector<std::string> names;
    for (const auto& e : builtin_zoo()) names.push_back(e.name);
    return names;
  });

  m.def("canonical_expression", [](const std::string& src, std::vector<std::string> params) {
    return parse_expression(src, std::move(params)).to_string();
  }, py::arg("source"), py::arg("params") = std::vector<std::string>{});

  m.def("evaluate_map", [](const std::string& spec, double x, double y) {
    const Vec2 p = map_from_text(spec).eval({x, y});
    return std::make_pair(p.x, p.y);
  }, py::arg("spec"), py::arg("x"), py::arg("y"));

  m.def("fixed_points", [](const std::string& spec, int n, std::array<double, 4> region, int grid) {
    const auto f = map_from_text(spec);
    py::list out;
    for (const auto& r : find_periodic_points(f, n, Rect{region[0], region[1], region[2], region[3]}, grid)) {
      py::dict d;
      d["location"] = std::make_pair(r.location.x, r.location.y);
      d["classification"] = class_name(r.cls);
      d["minimal_period"] = r.minimal_period;
      d["index"] = index_at_point(f, n, r.location);
      out.append(d);
    }
    return out;
  }, py::arg("spec"), py::arg("n") = 1, py::arg("region") = std::array<double, 4>{-2, 2, -2, 2},
     py::arg("grid") = 60);

  // Returns (exit_code, report JSON text); `out_dir` empty skips the artifacts.
  m.def("run_config", [](const std::string& text, const std::string& out_dir) {
    const ScenarioConfig cfg = parse_scenario(text);
    RunResult res;
    {
      py::gil_scoped_release release;
      res = run_scenario(cfg);
      if (!out_dir.empty()) write_artifacts(res, out_dir);
    }
    return std::make_pair(res.exit_code, res.report.dump());
  }, py::arg("config_text"), py::arg("out_dir") = "");
}
