#include "pinnet/certify.hpp"
#include "pinnet/cli.hpp"
#include "pinnet/diagnostics.hpp"
#include "pinnet/reproduce.hpp"
#include "pinnet/scenario_io.hpp"
#include "pinnet/simulate.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/iostream.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <sstream>

namespace py = pybind11;
using namespace pinnet;

namespace {

// (K, n, p) array from a per-sample list of n x p matrices.
py::array_t<double> stack(const std::vector<Matrix>& mats, std::size_t n, Eigen::Index p) {
  py::array_t<double> out({mats.size(), n, static_cast<std::size_t>(p)});
  auto view = out.mutable_unchecked<3>();
  for (std::size_t k = 0; k < mats.size(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) view(k, i, j) = mats[k](static_cast<Eigen::Index>(i), j);
  return out;
}

py::array_t<double> stack(const std::vector<Vector>& vecs, Eigen::Index width) {
  py::array_t<double> out({vecs.size(), static_cast<std::size_t>(width)});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < vecs.size(); ++k)
    for (Eigen::Index j = 0; j < width; ++j) view(k, j) = vecs[k](j);
  return out;
}

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict record_to_dict(const TrajectoryRecord& rec) {
  py::dict d;
  d["t"] = array(rec.times);
  d["states"] = stack(rec.states, rec.nodes, rec.state_dim);
  d["reference"] = stack(rec.reference, rec.state_dim);
  d["inputs"] = stack(rec.inputs, rec.nodes, rec.state_dim);
  d["error_norms"] = stack(rec.error_norms, static_cast<Eigen::Index>(rec.nodes));
  d["V"] = array(rec.V);
  d["v1"] = array(rec.v1);
  d["v2"] = array(rec.v2);
  d["v3"] = array(rec.v3);
  return d;
}

py::dict estimate_to_dict(const AssumptionEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["raw"] = e.raw;
  d["source"] = to_string(e.source);
  d["sample_count"] = e.sample_count;
  if (e.region) d["region"] = py::make_tuple(e.region->low, e.region->high);
  return d;
}

py::dict certificate_to_dict(const Certificate& c) {
  py::dict d;
  d["theta_f"] = estimate_to_dict(c.theta_f_estimate);
  d["theta_h"] = estimate_to_dict(c.theta_h_estimate);
  d["coupling"] = c.coupling;
  d["norm_L_kron"] = c.norm_L_kron;
  d["gain"] = c.gain;
  d["pin_mask"] = c.pin_mask;
  d["lambda_max"] = c.lambda_max;
  d["certified"] = c.certified;
  d["min_certified_gain"] = c.min_gain ? py::cast(*c.min_gain) : py::none();
  d["report"] = describe(c);
  return d;
}

StateBox make_box(const Vector& low, const Vector& high) {
  StateBox box{low, high};
  box.validate();
  return box;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the pinnet package";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);
  py::register_exception<IntegrationFault>(m, "SimulationFault", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("gain", &Scenario::gain)
      .def_readwrite("pinned", &Scenario::pinned)
      .def_readwrite("initial_states", &Scenario::initial_states)
      .def_readwrite("reference_initial", &Scenario::reference_initial)
      .def_property(
          "dt", [](const Scenario& s) { return s.integration.dt; },
          [](Scenario& s, double v) { s.integration.dt = v; })
      .def_property(
          "t_end", [](const Scenario& s) { return s.integration.t_end; },
          [](Scenario& s, double v) { s.integration.t_end = v; })
      .def_property(
          "record_stride", [](const Scenario& s) { return s.integration.record_stride; },
          [](Scenario& s, std::size_t v) { s.integration.record_stride = v; })
      .def_property(
          "samples", [](const Scenario& s) { return s.estimation.samples; },
          [](Scenario& s, std::size_t v) { s.estimation.samples = v; })
      .def_property_readonly("nodes", &Scenario::size)
      .def_property_readonly("state_dim", &Scenario::state_dim)
      .def_property_readonly("kind", [](const Scenario& s) { return kind_of(s.reference); })
      .def("validate", &Scenario::validate)
      .def("normalized", &normalize_scenario, "Fully explicit YAML text of the scenario")
      .def("__repr__", [](const Scenario& s) {
        std::ostringstream os;
        os << "<Scenario " << s.name << ": " << s.size() << " x " << kind_of(s.reference) << ", gain "
           << s.gain << ">";
        return os.str();
      });

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("seed") = std::nullopt);
  m.def("load_scenario", &load_scenario, py::arg("path"), py::arg("seed") = std::nullopt);

  m.def(
      "simulate",
      [](const Scenario& s) {
        TrajectoryRecord rec;
        {
          py::gil_scoped_release release;
          rec = simulate(s);
        }
        return record_to_dict(rec);
      },
      py::arg("scenario"),
      "Integrate the scenario; returns arrays keyed t, states (K, n, p), reference (K, p), "
      "inputs, error_norms (K, n), V, v1, v2, v3.");

  m.def(
      "certify",
      [](const Scenario& s, bool with_bounds) {
        Certificate cert;
        std::optional<BoundReport> bounds;
        {
          py::gil_scoped_release release;
          cert = certify_scenario(s);
          if (with_bounds) bounds = check_proof_bounds(simulate(s), cert);
        }
        py::dict d = certificate_to_dict(cert);
        if (bounds) {
          py::dict b;
          for (const BoundResult* r : {&bounds->v1, &bounds->v2, &bounds->v3, &bounds->total}) {
            b[py::str(r->name)] = r->violations();
          }
          d["bound_violations"] = b;
        }
        return d;
      },
      py::arg("scenario"), py::arg("check_bounds") = false);

  m.def("certificate_lambda_max", &certificate_lambda_max, py::arg("theta_f"), py::arg("theta_h"),
        py::arg("c"), py::arg("norm_L_kron"), py::arg("gain"), py::arg("pin_mask"));
  m.def("min_certified_gain", &min_certified_gain, py::arg("theta_f"), py::arg("theta_h"), py::arg("c"),
        py::arg("norm_L_kron"), py::arg("pin_mask"));

  m.def(
      "estimate_theta_f",
      [](const std::function<Vector(const Vector&)>& f, const std::vector<Vector>& reference_samples,
         const Vector& low, const Vector& high, std::size_t samples, double safety_factor, std::uint64_t seed) {
        auto wrapped = [&f](const VectorRef& x) { return f(Vector(x)); };
        return estimate_to_dict(
            estimate_theta_f(wrapped, reference_samples, make_box(low, high), {samples, safety_factor, seed}));
      },
      py::arg("f"), py::arg("reference_samples"), py::arg("low"), py::arg("high"), py::arg("samples") = 100000,
      py::arg("safety_factor") = 1.05, py::arg("seed") = 0);
  m.def(
      "estimate_theta_h",
      [](const std::function<Vector(const Vector&)>& h, const Vector& low, const Vector& high, std::size_t samples,
         double safety_factor, std::uint64_t seed) {
        auto wrapped = [&h](const VectorRef& x) { return h(Vector(x)); };
        return estimate_to_dict(estimate_theta_h(wrapped, make_box(low, high), {samples, safety_factor, seed}));
      },
      py::arg("h"), py::arg("low"), py::arg("high"), py::arg("samples") = 100000, py::arg("safety_factor") = 1.05,
      py::arg("seed") = 0);

  m.def(
      "laplacian",
      [](const Matrix& adjacency, const std::string& normalization) {
        return build_laplacian(Adjacency(adjacency), laplacian_normalization_from_string(normalization)).matrix();
      },
      py::arg("adjacency"), py::arg("normalization") = "none");
  m.def(
      "spectral_norm", [](const Matrix& L) { return laplacian_spectral_norm(Laplacian(L)); }, py::arg("L"));
  m.def(
      "kron_identity_norm", [](const Matrix& L, std::size_t p) { return kron_identity_norm(Laplacian(L), p); },
      py::arg("L"), py::arg("p"));
  m.def(
      "order_parameter", [](const Vector& phases) { return order_parameter(phases); }, py::arg("phases"));

  m.def(
      "reproduce",
      [](std::optional<std::filesystem::path> scenario_dir) {
        const auto dir = scenario_dir.value_or(default_scenario_dir());
        py::list out;
        for (const auto& report : {reproduce_kuramoto(load_scenario(dir / "kuramoto_paper.yaml")),
                                   reproduce_jansen_rit(load_scenario(dir / "jansen_rit_paper.yaml"))}) {
          for (const auto& c : report.criteria) {
            py::dict d;
            d["scenario"] = report.scenario;
            d["id"] = c.id;
            d["passed"] = c.passed;
            d["detail"] = c.detail;
            out.append(d);
          }
        }
        return out;
      },
      py::arg("scenario_dir") = std::nullopt);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        py::scoped_ostream_redirect out(std::cout, py::module_::import("sys").attr("stdout"));
        py::scoped_ostream_redirect err(std::cerr, py::module_::import("sys").attr("stderr"));
        return cli_main(args, std::cout, std::cerr);
      },
      py::arg("args"), "Run the command-line tool in-process; returns its exit code.");
}
