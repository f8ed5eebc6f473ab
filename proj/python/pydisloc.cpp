#include "disloc/annulus_cell.hpp"
#include "disloc/dislocation_sim.hpp"
#include "disloc/harness/commands.hpp"
#include "disloc/korn.hpp"
#include "disloc/relaxation_phi.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace disloc;

namespace {

Domain2D domain_from(const std::string& name) {
  if (name == "unit-disk") return Domain2D::unit_disk();
  if (name == "unit-square") return Domain2D::unit_square();
  throw ConfigError("domain must be unit-disk or unit-square");
}

BurgersSystem system_from(const std::string& name) {
  if (name == "square") return BurgersSystem::square();
  if (name == "hexagonal") return BurgersSystem::hexagonal();
  throw ConfigError("burgers system must be square or hexagonal");
}

}  // namespace

PYBIND11_MODULE(pydisloc, m) {
  m.doc() = "Dislocation self-energies, relaxed plastic densities and energy scaling in 2D linear elasticity.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<ElasticTensor>(m, "ElasticTensor")
      .def_static("toy", &ElasticTensor::toy)
      .def_static("isotropic", &ElasticTensor::isotropic, py::arg("lam"), py::arg("mu"))
      .def_static("general", &ElasticTensor::general, py::arg("entries"))
      .def_property_readonly("mode", [](const ElasticTensor& c) { return std::string(to_string(c.mode())); })
      .def_property_readonly("coercive", &ElasticTensor::coercive)
      .def("energy_density", &ElasticTensor::energy_density, py::arg("xi"))
      .def("apply", &ElasticTensor::apply, py::arg("xi"));

  py::class_<PsiTable>(m, "PsiTable")
      .def_property_readonly("radius", &PsiTable::radius)
      .def_property_readonly("size", [](const PsiTable& t) { return t.entries().size(); })
      .def("psi", [](const PsiTable& t, const Vec2& xi) { return t.form()(xi); }, py::arg("xi"));

  m.def(
      "psi_table",
      [](const ElasticTensor& c, const std::string& system, double radius) {
        return build_psi_table(c, system_from(system), radius);
      },
      py::arg("tensor"), py::arg("system") = "square", py::arg("radius") = 4.0,
      "psi tabulated on the lattice ball; raises ConfigError when the radius is insufficient");

  m.def(
      "phi", [](const Vec2& xi, const PsiTable& t) { return phi(xi, t).value; }, py::arg("xi"), py::arg("table"),
      "relaxed plastic density: cheapest nonnegative combination of table vectors");

  m.def(
      "solve_cell",
      [](const ElasticTensor& c, const Vec2& xi, double eps, int n_theta) {
        CellMeshParams p;
        p.n_theta = n_theta;
        const CellSolution s = solve_cell(c, xi, eps, p);
        return py::dict(py::arg("psi_eps") = s.value, py::arg("energy") = s.energy,
                        py::arg("residual") = s.residual, py::arg("iterations") = s.iterations);
      },
      py::arg("tensor"), py::arg("xi"), py::arg("eps"), py::arg("n_theta") = 128);

  m.def(
      "minimize_energy",
      [](const std::vector<std::array<double, 4>>& dislocations, double eps, double rho, const ElasticTensor& c,
         const std::string& domain, double h) {
        DislocationConfig mu;
        for (const auto& d : dislocations) mu.dislocations.push_back({Vec2(d[0], d[1]), Vec2(d[2], d[3])});
        mu.eps = eps;
        mu.rho = rho > 0.0 ? rho : rho_gamma(eps, 0.5);
        SimParams p;
        p.h = h;
        const EnergyReport r = minimize_energy(domain_from(domain), mu, c, p).report;
        return py::dict(py::arg("total") = r.total, py::arg("self") = r.self, py::arg("inter") = r.inter,
                        py::arg("direct_total") = r.direct_total, py::arg("rho") = mu.rho);
      },
      py::arg("dislocations"), py::arg("eps"), py::arg("rho") = 0.0, py::arg("tensor") = ElasticTensor::toy(),
      py::arg("domain") = "unit-disk", py::arg("h") = 1.0 / 48.0,
      "dislocations as (x, y, xi1, xi2) rows; rho = 0 picks eps^0.5");

  m.def(
      "korn_sweep",
      [](const std::string& family, std::size_t n, std::uint64_t seed, const std::string& domain) {
        const KornSweep s = korn_sweep(korn_family_from_string(family), n, seed, domain_from(domain));
        return py::make_tuple(s.empirical_c, s.worst_descriptor);
      },
      py::arg("family"), py::arg("n_samples"), py::arg("seed"), py::arg("domain") = "unit-disk");

  m.def(
      "run",
      [](const std::string& command, const std::string& config_text, const std::string& out, bool check_burgers) {
        harness::RunConfig cfg = harness::RunConfig::parse(config_text);
        cfg.out = out;
        const harness::ResultRecord r = harness::run_command(command, cfg, {check_burgers});
        return py::dict(py::arg("config_hash") = r.config_hash, py::arg("input_hash") = r.input_hash,
                        py::arg("payloads") = r.payloads, py::arg("seconds") = r.seconds);
      },
      py::arg("command"), py::arg("config"), py::arg("out"), py::arg("check_burgers") = false,
      "runs a CLI command from configuration text");
}
