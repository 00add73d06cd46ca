#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "saddlekit/experiment.hpp"
#include "saddlekit/rates.hpp"
#include "saddlekit/regularity.hpp"
#include "saddlekit/solvers.hpp"
#include "saddlekit/spectral.hpp"

namespace sk = saddlekit;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

ordered_json json_number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::vector<double> parse_rho_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw sk::ConfigError("bad rho value '" + item + "'");
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sk::IoError("cannot write " + path.string());
  out << body;
  if (!out) throw sk::IoError("write failed for " + path.string());
}

struct RunArgs {
  std::string scenario = "well";
  int agents = 20;
  int dim = 20;
  std::uint64_t seed = 1;
  std::string out;
  std::string algorithms = "PD,AL,EXTRA,ED,DIFFUSION,DIGING,DLM";
  std::string rho = "1,10,100";
  std::string grid = "8:3";
  std::string graph;
  double edge_probability = 0.3;
  int max_iterations = 100000;
  double target = 1e-8;
  int trace_stride = 1;
};

int cmd_run(const RunArgs& a) {
  sk::ExperimentConfig config;
  config.scenario.scenario = sk::scenario_from_string(a.scenario);
  config.scenario.agents = a.agents;
  config.scenario.dim = a.dim;
  config.scenario.seed = a.seed;
  config.scenario.edge_probability = a.edge_probability;
  if (!a.graph.empty()) config.scenario.graph_file = a.graph;
  config.algorithms = sk::parse_algorithms(a.algorithms, parse_rho_list(a.rho));
  config.grid = sk::StepGrid::parse(a.grid);
  config.max_iterations = a.max_iterations;
  config.target_error = a.target;
  config.trace_stride = a.trace_stride;

  const sk::ExperimentResult result = sk::run_experiment(config);
  const auto manifest = sk::emit_results(result, a.out);

  std::cout << std::left << std::setw(28) << "algorithm" << std::setw(13) << "status"
            << std::setw(12) << "iterations" << "final_rel_error\n";
  for (const sk::AlgorithmSummary& s : result.summary) {
    std::cout << std::setw(28) << s.tag << std::setw(13) << sk::to_string(s.status)
              << std::setw(12) << s.iterations << s.final_rel_error << '\n';
  }
  std::cout << "wrote " << manifest.size() << " files to " << a.out << '\n';
  return kExitOk;
}

struct CertifyArgs {
  std::string problem;
  double mu_w = 0.0;
  double mu_lambda = 0.0;
  double rho = 0.0;
  bool json = false;
};

int cmd_certify(const CertifyArgs& a) {
  if (!(a.mu_w > 0.0) || !(a.mu_lambda > 0.0)) {
    throw sk::ConfigError("step sizes must be positive");
  }
  if (!(a.rho >= 0.0)) throw sk::ConfigError("rho must be nonnegative");
  const sk::EqualityConstrainedProblem problem = sk::load_problem(a.problem);
  const sk::SpectralInfo spectral = sk::spectral_quantities(problem.constraint_matrix());
  const sk::RegularityConstants constants = sk::quadratic_regularity(problem, a.rho);
  const sk::StepSizeBounds bounds =
      sk::step_size_bounds(constants, spectral, sk::BoundsRegime::kIncremental);

  ordered_json j;
  j["delta"] = constants.delta;
  j["nu"] = constants.nu;
  j["rho"] = constants.rho;
  j["delta_rho"] = constants.delta_rho;
  j["nu_rho"] = constants.nu_rho;
  j["sigma_max"] = spectral.sigma_max;
  j["sigma_min_nonzero"] = spectral.sigma_min_nonzero;
  j["mu_w_bound"] = bounds.mu_w_bound;
  j["mu_lambda_bound"] = bounds.mu_lambda_bound;
  j["mu_w"] = a.mu_w;
  j["mu_lambda"] = a.mu_lambda;
  std::string reason;
  try {
    const sk::RateReport rate = sk::theoretical_rate(constants, spectral, a.mu_w, a.mu_lambda);
    j["admissible"] = true;
    j["gamma"] = rate.gamma;
    j["gamma_primal"] = rate.gamma_primal;
    j["gamma_dual"] = rate.gamma_dual;
    j["c_w"] = rate.c_w;
    j["c_lambda"] = rate.c_lambda;
    j["kappa"] = rate.kappa;
  } catch (const sk::ConfigError& e) {
    reason = e.what();
    j["admissible"] = false;
    j["reason"] = reason;
  }

  if (a.json) {
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << std::setprecision(10);
  std::cout << "delta_rho       " << constants.delta_rho << '\n'
            << "nu_rho          " << constants.nu_rho << '\n'
            << "sigma_max       " << spectral.sigma_max << '\n'
            << "sigma_nonzero   " << spectral.sigma_min_nonzero << '\n'
            << "mu_w  < " << bounds.mu_w_bound << "   (given " << a.mu_w << ")\n"
            << "mu_l <= " << bounds.mu_lambda_bound << "   (given " << a.mu_lambda << ")\n";
  if (j["admissible"].get<bool>()) {
    std::cout << "admissible      yes\n"
              << "gamma           " << j["gamma"].get<double>() << '\n'
              << "c_w             " << j["c_w"].get<double>() << '\n'
              << "c_lambda        " << j["c_lambda"].get<double>() << '\n';
  } else {
    std::cout << "admissible      no (" << reason << ")\n";
  }
  return kExitOk;
}

struct SolveArgs {
  std::string problem;
  std::string method = "inc";
  double mu_w = 0.0;
  double mu_lambda = 0.0;
  double penalty = 0.0;
  bool auto_steps = false;
  int max_iterations = 1000;
  double tolerance = 1e-10;
  double divergence_threshold = 1e8;
  std::string out;
};

int cmd_solve(const SolveArgs& a) {
  const sk::Method method = sk::method_from_string(a.method);
  const sk::EqualityConstrainedProblem problem = sk::load_problem(a.problem);

  sk::SolverConfig config;
  config.penalty = a.penalty;
  config.max_iterations = a.max_iterations;
  config.stop_tolerance = a.tolerance;
  config.divergence_threshold = a.divergence_threshold;
  config.mu_w = a.mu_w;
  config.mu_lambda = a.mu_lambda;
  const sk::SpectralInfo spectral = sk::spectral_quantities(problem.constraint_matrix());
  const double rate_rho = method == sk::Method::kForwardBackward ? a.mu_lambda : a.penalty;

  if (a.auto_steps) {
    const auto [mw, ml] =
        sk::auto_step_sizes(sk::quadratic_regularity(problem, a.penalty), spectral);
    config.mu_w = mw;
    config.mu_lambda = ml;
  }
  config.validate();

  sk::RunOptions options;
  std::string reference_note;
  try {
    options.reference = sk::solve_kkt_reference(problem);
  } catch (const sk::AssumptionError& e) {
    reference_note = e.what();
  } catch (const sk::ConfigError& e) {
    reference_note = e.what();
  }
  const sk::Trace trace = sk::run_solver(problem, config, method, options);

  ordered_json meta;
  meta["method"] = sk::to_string(method);
  meta["config"] = {{"mu_w", config.mu_w},
                    {"mu_lambda", config.mu_lambda},
                    {"penalty", config.penalty},
                    {"max_iterations", config.max_iterations},
                    {"stop_tolerance", config.stop_tolerance},
                    {"divergence_threshold", config.divergence_threshold}};
  meta["status"] = sk::to_string(trace.status());
  meta["iterations"] = trace.records().empty() ? 0 : trace.records().back().iteration;
  meta["reference"] = options.reference.has_value();
  if (!reference_note.empty()) meta["reference_note"] = reference_note;
  if (method == sk::Method::kIncremental || method == sk::Method::kForwardBackward) {
    try {
      const auto constants = sk::quadratic_regularity(problem, rate_rho);
      const auto bounds =
          sk::step_size_bounds(constants, spectral, sk::BoundsRegime::kIncremental);
      meta["bounds"] = {{"mu_w_bound", bounds.mu_w_bound},
                        {"mu_lambda_bound", bounds.mu_lambda_bound}};
      const auto rate = sk::theoretical_rate(constants, spectral, config.mu_w, config.mu_lambda);
      meta["gamma"] = rate.gamma;
    } catch (const std::exception& e) {
      meta["gamma"] = nullptr;
      meta["rate_note"] = e.what();
    }
  }
  const auto& state = trace.final_state();
  meta["w"] = std::vector<double>(state.w.data(), state.w.data() + state.w.size());
  if (trace.has_errors() && !trace.records().empty()) {
    meta["final_rel_error"] = json_number(trace.records().back().rel_error);
  }

  if (!a.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(a.out, ec);
    if (ec) throw sk::IoError("cannot create output directory " + a.out);
    write_text(std::filesystem::path(a.out) / "trace.csv", sk::trace_to_csv(trace));
    write_text(std::filesystem::path(a.out) / "run.json", meta.dump(2) + "\n");
  }
  std::cout << meta.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual saddle-point solvers and distributed consensus experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Grid-search the distributed algorithms on a scenario");
  run->add_option("--scenario", run_args.scenario, "well | ill | nonconvex")
      ->check(CLI::IsMember({"well", "ill", "nonconvex"}));
  run->add_option("--K", run_args.agents, "number of agents");
  run->add_option("--M", run_args.dim, "dimension per agent");
  run->add_option("--seed", run_args.seed, "RNG seed");
  run->add_option("--out", run_args.out, "output directory")->required();
  run->add_option("--algorithms", run_args.algorithms,
                  "comma list of PD,AL,EXTRA,ED,DIFFUSION,DIGING,DLM (AL=rho for one value)");
  run->add_option("--rho", run_args.rho, "rho sweep for AL entries");
  run->add_option("--grid", run_args.grid, "PER_DECADE:DECADES");
  run->add_option("--graph", run_args.graph, "edge-list file for the topology");
  run->add_option("--edge-probability", run_args.edge_probability, "Erdos-Renyi p");
  run->add_option("--max-iter", run_args.max_iterations, "iteration budget per run");
  run->add_option("--target", run_args.target, "relative error target");
  run->add_option("--trace-stride", run_args.trace_stride, "keep every n-th error (0: none)");

  CertifyArgs certify_args;
  auto* certify = app.add_subcommand("certify", "Print step-size bounds and the contraction factor");
  certify->add_option("--problem", certify_args.problem, "problem JSON")->required();
  certify->add_option("--mu-w", certify_args.mu_w)->required();
  certify->add_option("--mu-lambda", certify_args.mu_lambda)->required();
  certify->add_option("--rho", certify_args.rho);
  certify->add_flag("--json", certify_args.json, "machine-readable output");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Run one primal-dual recursion on a problem file");
  solve->add_option("--problem", solve_args.problem, "problem JSON")->required();
  solve->add_option("--method", solve_args.method, "inc | noninc | fb")
      ->check(CLI::IsMember({"inc", "noninc", "fb"}));
  solve->add_option("--mu-w", solve_args.mu_w);
  solve->add_option("--mu-lambda", solve_args.mu_lambda);
  solve->add_option("--rho,--eta", solve_args.penalty, "penalty (rho for inc, eta for noninc)");
  solve->add_flag("--auto-steps", solve_args.auto_steps, "mu_w = 0.5/delta_rho, mu_l = nu_rho/smax^2");
  solve->add_option("--max-iter", solve_args.max_iterations);
  solve->add_option("--tol", solve_args.tolerance);
  solve->add_option("--divergence-threshold", solve_args.divergence_threshold);
  solve->add_option("--out", solve_args.out, "directory for trace.csv and run.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*certify) return cmd_certify(certify_args);
    if (*solve) return cmd_solve(solve_args);
  } catch (const sk::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
