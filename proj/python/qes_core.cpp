#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qes/errors.hpp"
#include "qes/output.hpp"
#include "qes/spectrum.hpp"
#include "qes/verify.hpp"

namespace py = pybind11;
using namespace qes;

namespace {

std::vector<Complex> as_vector(const CPoly& p) { return {p.coefficients().begin(), p.coefficients().end()}; }

std::string level_repr(const QesLevel& l) {
  return "QesLevel(energy=(" + output::format_double(l.energy.real()) + (l.energy.imag() < 0 ? "" : "+") +
         output::format_double(l.energy.imag()) + "j), branch=" + std::string(to_string(l.branch)) +
         ", reality=" + std::string(to_string(l.reality)) + ")";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "QES spectrum of H = p^2 - (zeta cosh 2x - iM)^2";

  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    }
  });

  py::enum_<Branch>(m, "Branch").value("P", Branch::P).value("Q", Branch::Q);
  py::enum_<Reality>(m, "Reality").value("REAL", Reality::Real).value("PAIR_MEMBER", Reality::PairMember);
  py::enum_<PTVerdict>(m, "PTVerdict").value("UNBROKEN", PTVerdict::Unbroken).value("BROKEN", PTVerdict::Broken);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<int, double>(), py::arg("m"), py::arg("zeta"))
      .def_property_readonly("m", &ModelParams::m)
      .def_property_readonly("zeta", &ModelParams::zeta)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(m=" + std::to_string(p.m()) + ", zeta=" + output::format_double(p.zeta()) + ")";
      });

  py::class_<QesLevel>(m, "QesLevel")
      .def_readonly("energy", &QesLevel::energy)
      .def_readonly("branch", &QesLevel::branch)
      .def_readonly("reality", &QesLevel::reality)
      .def_readonly("partner", &QesLevel::partner)
      .def_readonly("multiplicity", &QesLevel::multiplicity)
      .def("__repr__", &level_repr);

  py::class_<QesSpectrum>(m, "QesSpectrum")
      .def_readonly("params", &QesSpectrum::params)
      .def_readonly("levels", &QesSpectrum::levels)
      .def_readonly("pt_broken", &QesSpectrum::pt_broken)
      .def("energies", &QesSpectrum::energies)
      .def("all_real", &QesSpectrum::all_real)
      .def("to_json", [](const QesSpectrum& s) { return output::dump(output::spectrum_record(s, std::nullopt, 0)); })
      .def("__len__", [](const QesSpectrum& s) { return s.levels.size(); });

  py::class_<CriticalCoupling>(m, "CriticalCoupling")
      .def_readonly("m", &CriticalCoupling::m)
      .def_readonly("zeta_c", &CriticalCoupling::zeta_c)
      .def_readonly("bracket_width", &CriticalCoupling::bracket_width);

  py::class_<ScanPoint>(m, "ScanPoint")
      .def_readonly("zeta", &ScanPoint::zeta)
      .def_readonly("levels", &ScanPoint::levels)
      .def_readonly("error", &ScanPoint::error);

  py::class_<PTClassification>(m, "PTClassification")
      .def_readonly("verdict", &PTClassification::verdict)
      .def_readonly("eigenvalue", &PTClassification::eigenvalue)
      .def_readonly("partner", &PTClassification::partner)
      .def_readonly("residual", &PTClassification::residual);

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("oracle_match", &VerificationReport::oracle_match)
      .def_readonly("oracle_distance", &VerificationReport::oracle_distance)
      .def_readonly("max_ode_residual", &VerificationReport::max_ode_residual)
      .def_readonly("pt_verdicts", &VerificationReport::pt_verdicts)
      .def_readonly("pt_consistent", &VerificationReport::pt_consistent)
      .def("ok", [](const VerificationReport& r) { return r.ok(); });

  m.def(
      "solve", [](int mm, double zeta) { return solve(ModelParams(mm, zeta)); }, py::arg("m"), py::arg("zeta"),
      "QES levels for integer M >= 1 and nonzero zeta, sorted by (Re, Im).");
  m.def(
      "critical_zeta",
      [](int mm, double tol) {
        py::gil_scoped_release release;
        return critical_zeta(mm, tol);
      },
      py::arg("m"), py::arg("tol") = 1e-10, "Critical coupling for odd M >= 3 by bisection.");
  m.def(
      "anti_isospectral", [](const QesSpectrum& s) { return anti_isospectral(s); }, py::arg("spectrum"));
  m.def(
      "scan",
      [](int mm, const std::vector<double>& grid) {
        py::gil_scoped_release release;
        return scan(mm, grid);
      },
      py::arg("m"), py::arg("zeta_grid"), "Solve on every grid point, ordering levels along continuous tracks.");
  m.def(
      "critical_polynomial",
      [](int mm, double zeta, Branch b) { return as_vector(critical_polynomial(ModelParams(mm, zeta), b)); },
      py::arg("m"), py::arg("zeta"), py::arg("branch"), "Ascending coefficients of the branch's critical polynomial.");
  m.def(
      "roots", [](const std::vector<Complex>& coeffs) { return roots(CPoly(coeffs)); }, py::arg("coeffs"),
      "Roots of the polynomial with ascending coefficients.");
  m.def(
      "gauged_matrix",
      [](int mm, double zeta) {
        const GaugedMatrix g = build_gauged_matrix(ModelParams(mm, zeta));
        std::vector<std::vector<Complex>> rows(static_cast<std::size_t>(g.dim));
        for (int r = 0; r < g.dim; ++r)
          for (int c = 0; c < g.dim; ++c) rows[static_cast<std::size_t>(r)].push_back(g(r, c));
        return rows;
      },
      py::arg("m"), py::arg("zeta"), "Gauged Hamiltonian on span{1, z, ..., z^(M-1)} as a list of rows.");
  m.def(
      "matrix_spectrum", [](int mm, double zeta) { return matrix_spectrum(build_gauged_matrix(ModelParams(mm, zeta))); },
      py::arg("m"), py::arg("zeta"));
  m.def(
      "verify", [](const QesSpectrum& s) { return verify_spectrum(s); }, py::arg("spectrum"),
      "Oracle, ODE-residual and PT checks for every level.");
}
