#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sepspec/analysis.hpp"
#include "sepspec/classical.hpp"
#include "sepspec/oracle.hpp"
#include "sepspec/potential.hpp"
#include "sepspec/quantization.hpp"
#include "sepspec/special.hpp"

namespace py = pybind11;
using namespace sepspec;

PYBIND11_MODULE(_sepspec, m) {
  m.doc() = "semiclassical double-well spectrum toolkit";

  py::class_<PotentialModel>(m, "PotentialModel")
      .def_property_readonly("coefficients", &PotentialModel::coefficients)
      .def_property_readonly("degree", &PotentialModel::degree)
      .def("__call__", [](const PotentialModel& v, double x) { return v(x); })
      .def("__str__", &PotentialModel::to_string);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("passed", &ValidationReport::passed)
      .def_readonly("barrier_curvature", &ValidationReport::barrier_curvature)
      .def_readonly("well_minima", &ValidationReport::well_minima)
      .def_readonly("v_min", &ValidationReport::v_min)
      .def_property_readonly("violations", [](const ValidationReport& r) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : r.violations) out.emplace_back(v.name, v.detail);
        return out;
      });

  py::enum_<Side>(m, "Side").value("left", Side::left).value("right", Side::right).value("both", Side::both);

  py::class_<SemiclassicalParams>(m, "SemiclassicalParams")
      .def(py::init<>())
      .def_readwrite("h", &SemiclassicalParams::h)
      .def_readwrite("alpha", &SemiclassicalParams::alpha)
      .def_readwrite("mu_plus", &SemiclassicalParams::mu_plus)
      .def_readwrite("mu_minus", &SemiclassicalParams::mu_minus)
      .def_readwrite("quad_tol", &SemiclassicalParams::quad_tol)
      .def_readwrite("root_tol", &SemiclassicalParams::root_tol)
      .def("window_halfwidth", &SemiclassicalParams::window_halfwidth);

  py::class_<BranchRoot>(m, "BranchRoot")
      .def_property_readonly("branch",
                             [](const BranchRoot& r) { return r.branch == Branch::A ? "A" : "B"; })
      .def_readonly("index", &BranchRoot::index)
      .def_readonly("lambda_", &BranchRoot::lambda)
      .def_readonly("energy", &BranchRoot::energy)
      .def_readonly("residual", &BranchRoot::residual);

  py::class_<SpectrumWindow>(m, "SpectrumWindow")
      .def_readonly("family_a", &SpectrumWindow::family_a)
      .def_readonly("family_b", &SpectrumWindow::family_b)
      .def_readonly("merged", &SpectrumWindow::merged)
      .def_property_readonly("anomaly_count",
                             [](const SpectrumWindow& w) { return w.anomalies.size(); });

  py::class_<OracleSpectrum>(m, "OracleSpectrum")
      .def_readonly("eigenvalues", &OracleSpectrum::eigenvalues)
      .def_readonly("richardson_error", &OracleSpectrum::richardson_error)
      .def_readonly("converged", &OracleSpectrum::converged);

  py::class_<CalibrationResult>(m, "CalibrationResult")
      .def_readonly("mu_plus", &CalibrationResult::mu_plus)
      .def_readonly("mu_minus", &CalibrationResult::mu_minus)
      .def_readonly("matching_rms", &CalibrationResult::matching_rms)
      .def_readonly("h_calibration", &CalibrationResult::h_calibration);

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("max_abs_diff", &ComparisonReport::max_abs_diff)
      .def_readonly("rms_diff", &ComparisonReport::rms_diff)
      .def_readonly("unmatched_semiclassical", &ComparisonReport::unmatched_semiclassical)
      .def_readonly("unmatched_oracle", &ComparisonReport::unmatched_oracle)
      .def_readonly("median_gap_a", &ComparisonReport::median_gap_a)
      .def_readonly("median_gap_b", &ComparisonReport::median_gap_b)
      .def_readonly("structure_failure", &ComparisonReport::structure_failure)
      .def_property_readonly("pairs", [](const ComparisonReport& r) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : r.pairs) out.emplace_back(p.semiclassical, p.oracle, p.difference);
        return out;
      });

  m.def("parse_potential", &parse_potential, py::arg("expression"));
  m.def("validate_double_well", &validate_double_well, py::arg("potential"));
  m.def("recenter", &recenter, py::arg("potential"));
  m.def("eval_potential", &eval, py::arg("potential"), py::arg("x"), py::arg("order") = 0);

  m.def("well_action", &well_action, py::arg("potential"), py::arg("energy"), py::arg("side"),
        py::arg("rel_tol") = 1e-10);
  m.def("epsilon0", &epsilon0, py::arg("energy"), py::arg("potential"));
  m.def("return_period", &return_period, py::arg("potential"), py::arg("h"), py::arg("tol") = 1e-12);
  m.def(
      "turning_points",
      [](const PotentialModel& V, double E, Side side) { return turning_points(V, E, side).roots; },
      py::arg("potential"), py::arg("energy"), py::arg("side"));

  m.def(
      "gamma_line",
      [](double y) {
        auto g = gamma_line(y);
        return std::make_pair(g.log_modulus, g.argument);
      },
      py::arg("y"), "returns (log_modulus, argument) of Gamma(1/2 + iy)");
  m.def("stirling_arg", &stirling_arg, py::arg("y"));

  m.def("cdvp_residual",
        py::overload_cast<double, const PotentialModel&, const SemiclassicalParams&>(&cdvp_residual),
        py::arg("energy"), py::arg("potential"), py::arg("params"));
  m.def("enumerate_window", &enumerate_window, py::arg("potential"), py::arg("params"));
  m.def("enumerate_energy_range", &enumerate_energy_range, py::arg("potential"), py::arg("params"),
        py::arg("e_lo"), py::arg("e_hi"));
  m.def("regular_bs_top", &regular_bs_top, py::arg("potential"), py::arg("h"), py::arg("e_lo"),
        py::arg("e_hi"), py::arg("offset") = 0.5, py::arg("quad_tol") = 1e-10);

  m.def("oracle_solve", &solve, py::arg("potential"), py::arg("h"), py::arg("window_lo"),
        py::arg("window_hi"), py::arg("tol"));
  m.def("calibrate", &calibrate, py::arg("potential"), py::arg("h0"), py::arg("params"),
        py::arg("oracle_eigenvalues"));
  m.def("compare", &compare, py::arg("potential"), py::arg("h"), py::arg("params"),
        py::arg("oracle_tol"));
}
