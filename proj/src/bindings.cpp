#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cdme/analysis.hpp"
#include "cdme/basis.hpp"
#include "cdme/coeff_state.hpp"
#include "cdme/generator.hpp"
#include "cdme/mcsim.hpp"
#include "cdme/multi_index.hpp"

namespace py = pybind11;
using namespace cdme;

namespace {

// Python callables must not cross worker threads, so densities coming from
// Python force the single-threaded path.
SimConfig build_sim_config(double creation_total, double annihilation_rate, double horizon,
                           std::uint64_t replicas, std::uint64_t master_seed,
                           int histogram_bins, const std::vector<double>& cosine_coeffs) {
  SimConfig cfg;
  cfg.creation_total = creation_total;
  cfg.annihilation_rate = annihilation_rate;
  cfg.horizon = horizon;
  cfg.replicas = replicas;
  cfg.master_seed = master_seed;
  cfg.histogram_bins = histogram_bins;
  if (!cosine_coeffs.empty() && creation_total > 0.0) {
    const std::vector<double> coeffs = cosine_coeffs;
    const double total = creation_total;
    cfg.creation_uniform = false;
    cfg.creation_density = [coeffs, total](double x) {
      double v = coeffs[0];
      for (std::size_t k = 2; k <= coeffs.size(); ++k) {
        v += coeffs[k - 1] * std::numbers::sqrt2 * std::cos((k - 1) * std::numbers::pi * x);
      }
      return v / total;
    };
    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i) sup = std::max(sup, cfg.creation_density(i / 1000.0));
    cfg.creation_density_sup = 1.01 * sup;
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral hierarchy, exact Monte Carlo, and master-equation reduction "
            "for creation/pair-annihilation reaction-diffusion on [0,1]";

  py::class_<ModeBasis>(m, "ModeBasis")
      .def(py::init<int>(), py::arg("num_modes"))
      .def_property_readonly("num_modes", &ModeBasis::num_modes)
      .def("eigenvalue", &ModeBasis::eigenvalue, py::arg("k"))
      .def("eval", &ModeBasis::eval, py::arg("k"), py::arg("x"))
      .def_property_readonly("eigenvalues", &ModeBasis::eigenvalues);

  m.def("make_basis", &make_basis, py::arg("num_modes"));
  m.def("eval_mode", &eval_mode, py::arg("basis"), py::arg("k"), py::arg("x"));

  py::class_<CreationRate>(m, "CreationRate")
      .def_readonly("total_rate", &CreationRate::total_rate)
      .def_readonly("mode_coeffs", &CreationRate::mode_coeffs)
      .def_readonly("density_sup", &CreationRate::density_sup)
      .def_readonly("uniform", &CreationRate::uniform)
      .def("density", [](const CreationRate& r, double x) { return r.density(x); },
           py::arg("x"));

  m.def("project_creation_rate", &project_creation_rate, py::arg("basis"),
        py::arg("rate_fn"), py::arg("quad_points"));
  m.def("constant_creation_rate", &constant_creation_rate, py::arg("basis"),
        py::arg("total_rate"));
  m.def("cosine_creation_rate", &cosine_creation_rate, py::arg("basis"), py::arg("coeffs"),
        py::arg("quad_points"));

  py::class_<MultiIndexSpace, SpacePtr>(m, "MultiIndexSpace")
      .def_property_readonly("num_modes", &MultiIndexSpace::num_modes)
      .def_property_readonly("max_degree", &MultiIndexSpace::max_degree)
      .def("__len__", &MultiIndexSpace::size)
      .def("index", [](const MultiIndexSpace& s, std::size_t i) { return s.at(i); },
           py::arg("i"))
      .def("find", &MultiIndexSpace::find, py::arg("beta"));

  m.def("make_space", [](int n, int m) { return make_space(n, m); }, py::arg("num_modes"),
        py::arg("max_degree"));

  py::class_<CoeffState>(m, "CoeffState")
      .def_readonly("space", &CoeffState::space)
      .def_readwrite("coeffs", &CoeffState::coeffs)
      .def_readonly("time", &CoeffState::time);

  m.def("vacuum_state", &vacuum_state, py::arg("space"));
  m.def("number_law", &number_law, py::arg("state"));
  m.def("intensity_coeffs", &intensity_coeffs, py::arg("state"));
  m.def("mass", &mass, py::arg("state"));
  m.def("eval_kernel",
        [](const CoeffState& s, const ModeBasis& b, const std::vector<double>& xs) {
          return eval_kernel(s, b, xs);
        },
        py::arg("state"), py::arg("basis"), py::arg("points"));
  m.def("state_to_json", [](const CoeffState& s) { return state_to_json(s).dump(); },
        py::arg("state"));

  py::class_<GeneratorMatrix>(m, "GeneratorMatrix")
      .def_property_readonly("dim", &GeneratorMatrix::dim)
      .def_property_readonly("nnz", &GeneratorMatrix::nnz)
      .def("entry", &GeneratorMatrix::entry, py::arg("row"), py::arg("col"))
      .def("apply", py::overload_cast<const std::vector<double>&>(&GeneratorMatrix::apply,
                                                                  py::const_),
           py::arg("x"));

  m.def("assemble_from_genfun", &assemble_from_genfun, py::arg("space"), py::arg("basis"),
        py::arg("creation"), py::arg("annihilation_rate"));
  m.def("assemble_from_cdme", &assemble_from_cdme, py::arg("space"), py::arg("basis"),
        py::arg("creation"), py::arg("annihilation_rate"), py::arg("quad_points"));
  m.def("max_entry_difference",
        [](const GeneratorMatrix& a, const GeneratorMatrix& b) {
          const EntryDifference d = max_entry_difference(a, b);
          return py::make_tuple(d.rel_error, d.row, d.col);
        },
        py::arg("a"), py::arg("b"));

  m.def("evolve",
        [](const CoeffState& state, const GeneratorMatrix& L,
           const std::vector<double>& times, const std::string& method, double dt) {
          IntegratorConfig cfg;
          cfg.output_times = times;
          cfg.dt = dt;
          cfg.method = method == "rk4" ? IntegratorConfig::Method::rk4
                                       : IntegratorConfig::Method::expm;
          return evolve(state, L, cfg);
        },
        py::arg("state"), py::arg("generator"), py::arg("times"),
        py::arg("method") = "expm", py::arg("dt") = 1e-3);

  m.def("cme_number_law",
        [](int max_count, double gamma, double lambda_d, const std::vector<double>& times) {
          return cme_evolve(cme_generator(max_count, gamma, lambda_d), times);
        },
        py::arg("max_count"), py::arg("gamma"), py::arg("lambda_d"), py::arg("times"));
  m.def("cme_stationary",
        [](int max_count, double gamma, double lambda_d) {
          return cme_stationary(cme_generator(max_count, gamma, lambda_d));
        },
        py::arg("max_count"), py::arg("gamma"), py::arg("lambda_d"));
  m.def("creation_only_law", &creation_only_law, py::arg("gamma"), py::arg("t"),
        py::arg("max_count"));
  m.def("weierstrass_transfer_check",
        [](int degree, const std::vector<double>& grid) {
          return weierstrass_transfer_check(degree, grid);
        },
        py::arg("degree"), py::arg("grid"));

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("number_law", &McEstimate::number_law)
      .def_readonly("number_law_stderr", &McEstimate::number_law_stderr)
      .def_readonly("bin_centers", &McEstimate::bin_centers)
      .def_readonly("intensity", &McEstimate::intensity)
      .def_readonly("intensity_stderr", &McEstimate::intensity_stderr)
      .def_readonly("replicas_used", &McEstimate::replicas_used);

  m.def("mc_estimate",
        [](double creation_total, double annihilation_rate, double horizon,
           std::uint64_t replicas, std::uint64_t master_seed, int histogram_bins,
           const std::vector<double>& cosine_coeffs) {
          return estimate(build_sim_config(creation_total, annihilation_rate, horizon,
                                           replicas, master_seed, histogram_bins,
                                           cosine_coeffs));
        },
        py::arg("creation_total"), py::arg("annihilation_rate"), py::arg("horizon"),
        py::arg("replicas"), py::arg("master_seed") = 0, py::arg("histogram_bins") = 20,
        py::arg("cosine_coeffs") = std::vector<double>{});

  m.attr("__version__") = "0.1.0";
}
