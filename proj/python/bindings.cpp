#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "saddlekit/experiment.hpp"
#include "saddlekit/rates.hpp"
#include "saddlekit/regularity.hpp"
#include "saddlekit/solvers.hpp"
#include "saddlekit/spectral.hpp"

namespace py = pybind11;
namespace sk = saddlekit;

namespace {

sk::EqualityConstrainedProblem make_problem(const sk::Matrix& R, const sk::Vector& r,
                                            const sk::Matrix& B, const sk::Vector& b) {
  return sk::make_quadratic_problem(R, r, B, b);
}

py::dict trace_dict(const sk::Trace& trace) {
  std::vector<int> iter;
  std::vector<double> primal, dual, lyap, range, rel;
  for (const auto& r : trace.records()) {
    iter.push_back(r.iteration);
    primal.push_back(r.primal_err_sq);
    dual.push_back(r.dual_err_sq);
    lyap.push_back(r.lyapunov);
    range.push_back(r.range_residual);
    rel.push_back(r.rel_error);
  }
  py::dict d;
  d["status"] = sk::to_string(trace.status());
  d["iter"] = iter;
  d["primal_err_sq"] = primal;
  d["dual_err_sq"] = dual;
  d["lyapunov"] = lyap;
  d["range_residual"] = range;
  d["rel_error"] = rel;
  d["has_errors"] = trace.has_errors();
  d["w"] = trace.final_state().w;
  d["lambda"] = trace.final_state().lambda;
  return d;
}

}  // namespace

PYBIND11_MODULE(_saddlekit, m) {
  m.doc() = "Primal-dual saddle-point solvers and decentralized consensus experiments";

  py::register_exception<sk::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<sk::IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<sk::AssumptionError>(m, "AssumptionError", PyExc_ArithmeticError);

  py::class_<sk::EqualityConstrainedProblem>(m, "Problem")
      .def(py::init(&make_problem), py::arg("R"), py::arg("r"), py::arg("B"), py::arg("b"),
           "Quadratic cost w'Rw + r'w subject to Bw = b.")
      .def_property_readonly("dim_primal", &sk::EqualityConstrainedProblem::dim_primal)
      .def_property_readonly("dim_constraints",
                             &sk::EqualityConstrainedProblem::dim_constraints)
      .def_property_readonly("B", &sk::EqualityConstrainedProblem::constraint_matrix)
      .def_property_readonly("b", &sk::EqualityConstrainedProblem::constraint_rhs)
      .def("value", [](const sk::EqualityConstrainedProblem& p,
                       const sk::Vector& w) { return p.cost().value(w); })
      .def("gradient", [](const sk::EqualityConstrainedProblem& p,
                          const sk::Vector& w) { return p.cost().gradient(w); })
      .def("augmented_gradient", &sk::EqualityConstrainedProblem::augmented_gradient,
           py::arg("w"), py::arg("rho"))
      .def("to_json", [](const sk::EqualityConstrainedProblem& p) {
        return sk::problem_to_json(p);
      });
  m.def("problem_from_json", &sk::problem_from_json);
  m.def("load_problem", &sk::load_problem);
  m.def("save_problem", &sk::save_problem);

  py::class_<sk::SaddleReference>(m, "SaddleReference")
      .def_readonly("w_star", &sk::SaddleReference::w_star)
      .def_readonly("lambda_star_b", &sk::SaddleReference::lambda_star_b)
      .def_readonly("kkt_stationarity_residual",
                    &sk::SaddleReference::kkt_stationarity_residual)
      .def_readonly("kkt_feasibility_residual", &sk::SaddleReference::kkt_feasibility_residual);
  m.def("solve_kkt_reference", &sk::solve_kkt_reference);

  py::class_<sk::SpectralInfo>(m, "SpectralInfo")
      .def_readonly("sigma_max", &sk::SpectralInfo::sigma_max)
      .def_readonly("sigma_min", &sk::SpectralInfo::sigma_min)
      .def_readonly("sigma_min_nonzero", &sk::SpectralInfo::sigma_min_nonzero)
      .def_readonly("rank", &sk::SpectralInfo::rank)
      .def_readonly("singular_values", &sk::SpectralInfo::singular_values);
  m.def("spectral_quantities", &sk::spectral_quantities);

  py::class_<sk::RegularityConstants>(m, "RegularityConstants")
      .def_static("make", &sk::RegularityConstants::make, py::arg("delta"), py::arg("nu"),
                  py::arg("rho"), py::arg("sigma_max"), py::arg("nu_rho"))
      .def_readonly("delta", &sk::RegularityConstants::delta)
      .def_readonly("nu", &sk::RegularityConstants::nu)
      .def_readonly("rho", &sk::RegularityConstants::rho)
      .def_readonly("delta_rho", &sk::RegularityConstants::delta_rho)
      .def_readonly("nu_rho", &sk::RegularityConstants::nu_rho);
  m.def("quadratic_regularity", &sk::quadratic_regularity, py::arg("problem"),
        py::arg("rho") = 0.0);

  py::enum_<sk::BoundsRegime>(m, "BoundsRegime")
      .value("INCREMENTAL", sk::BoundsRegime::kIncremental)
      .value("NONINCREMENTAL_ETA0", sk::BoundsRegime::kNonIncrementalEta0);
  py::class_<sk::StepSizeBounds>(m, "StepSizeBounds")
      .def_readonly("mu_w_bound", &sk::StepSizeBounds::mu_w_bound)
      .def_readonly("mu_lambda_bound", &sk::StepSizeBounds::mu_lambda_bound)
      .def_readonly("regime", &sk::StepSizeBounds::regime)
      .def_readonly("delta_prime", &sk::StepSizeBounds::delta_prime)
      .def_readonly("nu_prime", &sk::StepSizeBounds::nu_prime)
      .def("admits", &sk::StepSizeBounds::admits);
  m.def("step_size_bounds", &sk::step_size_bounds, py::arg("constants"), py::arg("spectral"),
        py::arg("regime") = sk::BoundsRegime::kIncremental);

  py::class_<sk::RateReport>(m, "RateReport")
      .def_readonly("gamma", &sk::RateReport::gamma)
      .def_readonly("gamma_primal", &sk::RateReport::gamma_primal)
      .def_readonly("gamma_dual", &sk::RateReport::gamma_dual)
      .def_readonly("c_w", &sk::RateReport::c_w)
      .def_readonly("c_lambda", &sk::RateReport::c_lambda)
      .def_readonly("kappa", &sk::RateReport::kappa);
  m.def("theoretical_rate", &sk::theoretical_rate, py::arg("constants"), py::arg("spectral"),
        py::arg("mu_w"), py::arg("mu_lambda"));

  m.def(
      "solve",
      [](const sk::EqualityConstrainedProblem& problem, const std::string& method,
         double mu_w, double mu_lambda, double penalty, int max_iterations,
         double stop_tolerance, bool with_reference, std::optional<sk::Vector> w_init,
         std::optional<sk::Vector> lambda_init) {
        sk::SolverConfig config;
        config.mu_w = mu_w;
        config.mu_lambda = mu_lambda;
        config.penalty = penalty;
        config.max_iterations = max_iterations;
        config.stop_tolerance = stop_tolerance;
        if (w_init) config.w_init = *w_init;
        if (lambda_init) config.lambda_init = *lambda_init;
        sk::RunOptions options;
        if (with_reference) options.reference = sk::solve_kkt_reference(problem);
        return trace_dict(
            sk::run_solver(problem, config, sk::method_from_string(method), options));
      },
      py::arg("problem"), py::arg("method") = "inc", py::arg("mu_w"), py::arg("mu_lambda"),
      py::arg("penalty") = 0.0, py::arg("max_iterations") = 1000,
      py::arg("stop_tolerance") = 1e-10, py::arg("with_reference") = true,
      py::arg("w_init") = py::none(), py::arg("lambda_init") = py::none(),
      "Run one recursion ('inc', 'noninc' or 'fb') and return its trace as a dict.");

  py::class_<sk::NuRhoEstimate>(m, "NuRhoEstimate")
      .def_readonly("nu_rho", &sk::NuRhoEstimate::nu_rho)
      .def_readonly("eta_star", &sk::NuRhoEstimate::eta_star)
      .def_readonly("limit_consistent", &sk::NuRhoEstimate::limit_consistent);
  m.def("nu_rho_estimate", &sk::nu_rho_estimate, py::arg("beta_bar"), py::arg("delta"),
        py::arg("sigma_underbar_sq"), py::arg("rho"));

  m.def(
      "metropolis_weights",
      [](int node_count, const std::vector<std::pair<int, int>>& edges) {
        return sk::metropolis_weights(sk::Network(node_count, edges)).weights;
      },
      py::arg("node_count"), py::arg("edges"));
  m.def(
      "erdos_renyi",
      [](int node_count, double p, std::uint64_t seed) {
        const sk::GeneratedNetwork g = sk::erdos_renyi(node_count, p, seed);
        return py::make_tuple(g.network.edges(), g.seed_used);
      },
      py::arg("node_count"), py::arg("p") = 0.3, py::arg("seed") = 1,
      "Connected G(K, p) draw; returns (edges, seed_used).");

  m.def(
      "run_experiment",
      [](const std::string& scenario, int agents, int dim, std::uint64_t seed,
         const std::string& algorithms, const std::vector<double>& rho_sweep,
         const std::string& grid, int max_iterations, double target_error,
         std::optional<std::filesystem::path> out_dir) {
        sk::ExperimentConfig config;
        config.scenario.scenario = sk::scenario_from_string(scenario);
        config.scenario.agents = agents;
        config.scenario.dim = dim;
        config.scenario.seed = seed;
        config.algorithms = sk::parse_algorithms(algorithms, rho_sweep);
        config.grid = sk::StepGrid::parse(grid);
        config.max_iterations = max_iterations;
        config.target_error = target_error;
        config.trace_stride = out_dir ? 1 : 0;
        sk::ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = sk::run_experiment(config);
        }
        if (out_dir) sk::emit_results(result, *out_dir);
        return sk::summary_to_json(result);
      },
      py::arg("scenario") = "well", py::arg("K") = 20, py::arg("M") = 20, py::arg("seed") = 1,
      py::arg("algorithms") = "PD,AL,EXTRA,ED", py::arg("rho_sweep") = std::vector<double>{1, 10, 100},
      py::arg("grid") = "8:3", py::arg("max_iterations") = 100000,
      py::arg("target_error") = 1e-8, py::arg("out_dir") = py::none(),
      "Grid-search the distributed algorithms; returns the summary JSON text.");
}
