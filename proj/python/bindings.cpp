#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polarred/catalog.hpp"
#include "polarred/errors.hpp"
#include "polarred/io.hpp"
#include "polarred/verify.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace polarred;

namespace {

ReducedState make_state(const RVector& q, const RVector& p, const RVector& xi) { return {q, p, xi}; }

py::dict flow_dict(const FlowComparison& c) {
  return py::dict("max_deviation"_a = c.max_deviation, "max_q_deviation"_a = c.max_q_deviation,
                  "max_energy_deviation"_a = c.max_energy_deviation, "energy_drift"_a = c.energy_drift,
                  "casimir_drift"_a = c.casimir_drift, "max_xi_k_norm"_a = c.max_xi_k_norm,
                  "wall_collision"_a = c.wall_collision, "samples"_a = c.samples);
}

}  // namespace

PYBIND11_MODULE(_polarred, m) {
  m.doc() = "Reduction of geodesic systems under hyperpolar actions";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<RegularityError>(m, "RegularityError", PyExc_ArithmeticError);
  py::register_exception<ValidationFailure>(m, "ValidationFailure", PyExc_RuntimeError);

  py::class_<PolarActionModel>(m, "Model")
      .def_readonly("name", &PolarActionModel::name)
      .def_property_readonly("kind", [](const PolarActionModel& s) { return to_string(s.kind); })
      .def_property_readonly("rank", &PolarActionModel::rank)
      .def_property_readonly("n", &PolarActionModel::group_n)
      .def_property_readonly("dim_symmetry", [](const PolarActionModel& s) { return s.symmetry.dimension(); })
      .def_property_readonly("dim_k", [](const PolarActionModel& s) { return s.isotropy_split.k_dimension(); })
      .def_property_readonly("dim_kperp", [](const PolarActionModel& s) { return s.isotropy_split.kperp_dimension(); })
      .def_property_readonly("reference", [](const PolarActionModel& s) { return RVector(s.section.reference()); })
      .def("in_alcove", [](const PolarActionModel& s, const RVector& q) { return s.section.in_alcove(q); }, "q"_a)
      .def("__repr__", [](const PolarActionModel& s) { return "<Model " + s.name + ">"; });

  m.def("catalog_names", &catalog_names);
  m.def("build_model", [](const std::string& name) { return build_model(name).model; }, "name"_a);

  m.def("orbit_point", [](const PolarActionModel& model, const std::string& orbit) {
        return to_kperp(model, CoadjointOrbitSpec::parse(orbit, model.group_n()).base_point(model));
      }, "model"_a, "orbit"_a, "K^perp coordinates of the orbit base point");

  m.def("inertia", [](const PolarActionModel& model, const RVector& q) { return inertia_gram(model, q).b; },
        "model"_a, "q"_a);

  m.def("constraint_residual", [](const PolarActionModel& model, const RVector& q, const RVector& p, const RVector& xi) {
        return total_momentum(model, solve_constraint(model, make_state(q, p, xi))).norm();
      }, "model"_a, "q"_a, "p"_a, "xi"_a);

  m.def("reduced_hamiltonian", [](const PolarActionModel& model, const RVector& q, const RVector& p, const RVector& xi) {
        return reduced_hamiltonian(model, make_state(q, p, xi));
      }, "model"_a, "q"_a, "p"_a, "xi"_a);

  m.def("spin_potential", &spin_potential, "model"_a, "q"_a, "xi"_a);

  m.def("integrate", [](const PolarActionModel& model, const RVector& q, const RVector& p, const RVector& xi,
                        double t_end, double dt, const std::string& scheme, int sample_every) {
        const Trajectory t = integrate_reduced(model, make_state(q, p, xi), t_end, dt, parse_scheme(scheme), sample_every);
        std::vector<double> times, energy;
        std::vector<RVector> qs;
        for (const auto& s : t.samples) {
          times.push_back(s.t);
          energy.push_back(s.energy);
          qs.push_back(s.state.q);
        }
        return py::dict("t"_a = times, "q"_a = qs, "energy"_a = energy, "wall_collision"_a = t.wall_collision,
                        "energy_drift"_a = t.energy_drift(), "casimir_drift"_a = t.casimir_drift());
      }, "model"_a, "q"_a, "p"_a, "xi"_a, "t_end"_a, "dt"_a, "scheme"_a = "rk4", "sample_every"_a = 100);

  m.def("compare_flows", [](const PolarActionModel& model, const RVector& q, const RVector& p, const RVector& xi,
                            double t_end, double dt, const std::string& scheme, int sample_every) {
        return flow_dict(compare_flows(model, make_state(q, p, xi), t_end, dt, parse_scheme(scheme), sample_every));
      }, "model"_a, "q"_a, "p"_a, "xi"_a, "t_end"_a, "dt"_a, "scheme"_a = "rk4", "sample_every"_a = 100);

  m.def("derive_sutherland", [](int n, const std::string& orbit, int samples, std::uint64_t seed) {
        const SutherlandFit f = derive_sutherland(n, CoadjointOrbitSpec::parse(orbit, n), samples, seed);
        return py::dict("coefficient"_a = f.coefficient, "max_relative_residual"_a = f.max_relative_residual,
                        "coefficient_spread"_a = f.coefficient_spread, "free_model"_a = f.free_model);
      }, "n"_a, "orbit"_a, "samples"_a = 50, "seed"_a = 20240601);

  m.def("density", &density, "model"_a, "q"_a, "normalization"_a = 1.0);
  m.def("measure_term", [](const PolarActionModel& model, const RVector& q) { return measure_term(model, q); },
        "model"_a, "q"_a);

  m.def("spectrum", [](const PolarActionModel& model, const std::string& rep, int grid_n, int k) {
        return spectrum(assemble_reduced_operator(model, make_rep(model, rep), make_grid(model, grid_n)), k);
      }, "model"_a, "rep"_a = "trivial", "grid_n"_a = 2000, "k"_a = 5);

  m.def("su2_character", &su2_character, "j"_a, "q"_a);

  m.def("verify", [](std::uint64_t seed, bool inject_fault) {
        VerifyOptions o;
        o.seed = seed;
        o.inject_fault = inject_fault;
        py::list out;
        for (const auto& c : run_verify_suite(o))
          out.append(py::dict("name"_a = c.name, "passed"_a = c.passed, "value"_a = c.value, "tolerance"_a = c.tolerance));
        return out;
      }, "seed"_a = 20240601, "inject_fault"_a = false);
}
