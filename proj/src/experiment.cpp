#include "saddlekit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace saddlekit {

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

}  // namespace

std::string AlgorithmChoice::tag() const {
  if (algorithm == DistributedAlgorithm::kPrimalDual) {
    if (rho == 0.0) return "PD_DIST";
    return "AL_PD_DIST(rho=" + format_number(rho) + ")";
  }
  return to_string(algorithm);
}

std::vector<AlgorithmChoice> parse_algorithms(const std::string& list,
                                              const std::vector<double>& rho_sweep) {
  std::vector<AlgorithmChoice> out;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty()) continue;
    std::string name = upper(token);
    std::optional<double> explicit_rho;
    if (const auto eq = name.find('='); eq != std::string::npos) {
      try {
        explicit_rho = std::stod(name.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad rho in algorithm entry '" + token + "'");
      }
      name = name.substr(0, eq);
    }
    if (name == "PD" || name == "PD_DIST") {
      out.push_back({DistributedAlgorithm::kPrimalDual, 0.0});
    } else if (name == "AL" || name == "AL_PD" || name == "AL_PD_DIST") {
      if (explicit_rho) {
        if (!(*explicit_rho > 0.0)) throw ConfigError("AL entries need rho > 0");
        out.push_back({DistributedAlgorithm::kPrimalDual, *explicit_rho});
      } else {
        for (double rho : rho_sweep) {
          if (rho > 0.0) out.push_back({DistributedAlgorithm::kPrimalDual, rho});
        }
      }
    } else if (name == "EXTRA") {
      out.push_back({DistributedAlgorithm::kExtra, 0.0});
    } else if (name == "ED" || name == "EXACT_DIFFUSION") {
      out.push_back({DistributedAlgorithm::kExactDiffusion, 0.0});
    } else if (name == "DIFFUSION") {
      out.push_back({DistributedAlgorithm::kDiffusion, 0.0});
    } else if (name == "DIGING") {
      out.push_back({DistributedAlgorithm::kDiging, 0.0});
    } else if (name == "DLM") {
      out.push_back({DistributedAlgorithm::kDlm, 0.0});
    } else {
      throw ConfigError("unknown algorithm '" + token + "'");
    }
  }
  return out;
}

std::vector<double> StepGrid::values(double anchor) const {
  std::vector<double> out;
  const int n = per_decade * decades;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    out.push_back(anchor * std::pow(10.0, -static_cast<double>(j) / per_decade));
  }
  return out;
}

StepGrid StepGrid::parse(const std::string& text) {
  StepGrid g;
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      g.per_decade = std::stoi(text);
    } else {
      g.per_decade = std::stoi(text.substr(0, colon));
      g.decades = std::stoi(text.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw ConfigError("grid spec must look like PER_DECADE:DECADES, got '" + text + "'");
  }
  if (g.per_decade < 1 || g.decades < 1) {
    throw ConfigError("grid spec entries must be positive");
  }
  return g;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (algorithms.empty()) throw ConfigError("experiment: algorithm list is empty");
  if (grid.per_decade < 1 || grid.decades < 1) {
    throw ConfigError("experiment: grids must be positive");
  }
  if (max_iterations < 1) throw ConfigError("experiment: max_iterations must be >= 1");
  if (!(target_error > 0.0)) throw ConfigError("experiment: target_error must be positive");
  if (trace_stride < 0) throw ConfigError("experiment: trace_stride must be >= 0");
}

const AlgorithmSummary* ExperimentResult::find(const std::string& tag) const {
  for (const AlgorithmSummary& s : summary) {
    if (s.tag == tag) return &s;
  }
  return nullptr;
}

namespace {

struct GridPoint {
  AlgorithmParams params;
  // Lexicographic step size, primary step first; used for tie-breaking.
  std::vector<double> step_key;
};

std::vector<GridPoint> grid_points(const AlgorithmChoice& choice,
                                   const MultiAgentProblem& problem,
                                   const SpectralInfo& spectrum,
                                   const ConsensusOperators& ops, const StepGrid& grid) {
  const double delta = problem.smoothness();
  const double smax_sq = spectrum.sigma_max * spectrum.sigma_max;
  std::vector<GridPoint> points;
  switch (choice.algorithm) {
    case DistributedAlgorithm::kPrimalDual: {
      const double delta_rho = delta + choice.rho * smax_sq;
      for (double mu_w : grid.values(2.0 / delta_rho)) {
        for (double mu_l : grid.values(2.0 * delta_rho / smax_sq)) {
          GridPoint p;
          p.params.mu_w = mu_w;
          p.params.mu_lambda = mu_l;
          p.params.rho = choice.rho;
          p.step_key = {mu_w, mu_l};
          points.push_back(p);
        }
      }
      break;
    }
    case DistributedAlgorithm::kExtra:
    case DistributedAlgorithm::kExactDiffusion:
    case DistributedAlgorithm::kDiffusion:
    case DistributedAlgorithm::kDiging:
      for (double mu : grid.values(2.0 / delta)) {
        GridPoint p;
        p.params.mu = mu;
        p.step_key = {mu};
        points.push_back(p);
      }
      break;
    case DistributedAlgorithm::kDlm: {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(ops.laplacian, Eigen::EigenvaluesOnly);
      const double lap_max = eig.eigenvalues().maxCoeff();
      for (double c : grid.values(delta)) {
        for (double mu_w : grid.values(2.0 / (delta + c * lap_max))) {
          GridPoint p;
          p.params.c = c;
          p.params.d = 1.0 / mu_w;
          p.step_key = {mu_w, c};
          points.push_back(p);
        }
      }
      std::stable_sort(points.begin(), points.end(),
                       [](const GridPoint& a, const GridPoint& b) {
                         return a.step_key > b.step_key;
                       });
      break;
    }
  }
  return points;
}

std::optional<double> certified_rate(const AlgorithmChoice& choice,
                                     const AlgorithmParams& params,
                                     const MultiAgentProblem& problem,
                                     const ConsensusOperators& ops) {
  double mu_w = 0.0;
  double mu_l = 0.0;
  double rho = 0.0;
  if (choice.algorithm == DistributedAlgorithm::kPrimalDual) {
    mu_w = params.mu_w;
    mu_l = params.mu_lambda;
    rho = params.rho;
  } else if (choice.algorithm == DistributedAlgorithm::kExtra) {
    mu_w = params.mu;
    mu_l = 0.5 / params.mu;
    rho = 0.5 / params.mu;
  } else {
    return std::nullopt;
  }
  try {
    return distributed_rate_report(problem, ops, rho, mu_w, mu_l).rate.gamma;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool better(const RunRecord& candidate, const RunRecord& incumbent,
            const std::vector<double>& candidate_key,
            const std::vector<double>& incumbent_key) {
  if (candidate.iterations != incumbent.iterations) {
    return candidate.iterations < incumbent.iterations;
  }
  return candidate_key < incumbent_key;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, generate_scenario(config.scenario));
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const GeneratedScenario& generated) {
  config.validate();
  const MultiAgentProblem& problem = generated.problem;
  const Network& network = problem.network();
  const ConsensusOperators ops =
      build_consensus_operators(network, metropolis_weights(network), problem.block_dim());
  const SpectralInfo spectrum = consensus_spectrum(ops);

  ExperimentResult result;
  result.scenario = config.scenario;
  result.graph_seed = generated.graph_seed;
  result.problem_seed = generated.problem_seed;
  result.network_edges = network_to_edge_list(network);

  for (const AlgorithmChoice& choice : config.algorithms) {
    const std::vector<GridPoint> points =
        grid_points(choice, problem, spectrum, ops, config.grid);
    const std::size_t first = result.records.size();
    std::optional<std::size_t> best;
    std::vector<std::vector<double>> keys;

    for (const GridPoint& point : points) {
      int budget = config.max_iterations;
      if (best) budget = std::min(budget, result.records[*best].iterations);

      DistributedRunOptions options;
      options.max_iterations = budget;
      options.target_error = config.target_error;
      options.trace_stride = config.trace_stride;
      DistributedRun run =
          run_distributed(choice.algorithm, problem, ops, point.params, options);

      RunRecord rec;
      rec.tag = choice.tag();
      rec.choice = choice;
      rec.params = point.params;
      rec.status = run.status;
      rec.iterations = run.iterations;
      rec.iteration_budget = budget;
      rec.final_rel_error = run.final_rel_error;
      rec.gamma = certified_rate(choice, point.params, problem, ops);
      rec.trace = std::move(run.trace);
      result.records.push_back(std::move(rec));
      keys.push_back(point.step_key);

      const std::size_t idx = result.records.size() - 1;
      if (result.records[idx].status == RunStatus::kReached) {
        if (!best || better(result.records[idx], result.records[*best], keys[idx - first],
                            keys[*best - first])) {
          best = idx;
        }
      }
    }

    AlgorithmSummary summary;
    summary.tag = choice.tag();
    if (best) {
      summary.status = RunStatus::kReached;
      summary.best_record = *best;
    } else {
      const bool all_diverged =
          std::all_of(result.records.begin() + static_cast<std::ptrdiff_t>(first),
                      result.records.end(),
                      [](const RunRecord& r) { return r.status == RunStatus::kDiverged; });
      summary.status = all_diverged ? RunStatus::kDiverged : RunStatus::kNotReached;
      // Report the grid point that got closest.
      std::size_t pick = first;
      for (std::size_t i = first; i < result.records.size(); ++i) {
        const RunRecord& r = result.records[i];
        const RunRecord& p = result.records[pick];
        const bool r_ok = r.status != RunStatus::kDiverged;
        const bool p_ok = p.status != RunStatus::kDiverged;
        if ((r_ok && !p_ok) || (r_ok == p_ok && r.final_rel_error < p.final_rel_error)) {
          pick = i;
        }
      }
      summary.best_record = pick;
    }
    result.records[summary.best_record].best = true;
    summary.iterations = result.records[summary.best_record].iterations;
    summary.final_rel_error = result.records[summary.best_record].final_rel_error;
    result.summary.push_back(summary);
  }
  return result;
}

namespace {

using nlohmann::ordered_json;

std::string sanitize(const std::string& tag) {
  std::string out;
  for (char c : tag) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      out += c;
    } else if (c == '=' || c == '(') {
      out += '_';
    }
  }
  return out;
}

ordered_json params_json(const RunRecord& r) {
  ordered_json p;
  switch (r.choice.algorithm) {
    case DistributedAlgorithm::kPrimalDual:
      p["mu_w"] = r.params.mu_w;
      p["mu_lambda"] = r.params.mu_lambda;
      p["rho"] = r.params.rho;
      break;
    case DistributedAlgorithm::kDlm:
      p["c"] = r.params.c;
      p["d"] = r.params.d;
      break;
    default:
      p["mu"] = r.params.mu;
      break;
  }
  return p;
}

std::vector<std::string> trace_names(const ExperimentResult& result) {
  std::vector<std::string> names;
  std::string current;
  int index = 0;
  for (const RunRecord& r : result.records) {
    if (r.tag != current) {
      current = r.tag;
      index = 0;
    }
    std::ostringstream os;
    os << "trace_" << sanitize(r.tag) << '_' << std::setw(3) << std::setfill('0') << index++
       << ".csv";
    names.push_back(os.str());
  }
  return names;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string summary_to_json(const ExperimentResult& result) {
  const std::vector<std::string> names = trace_names(result);
  ordered_json j;
  j["scenario"] = to_string(result.scenario.scenario);
  j["K"] = result.scenario.agents;
  j["M"] = result.scenario.dim;
  j["seed"] = result.scenario.seed;
  j["graph_seed"] = result.graph_seed;
  j["problem_seed"] = result.problem_seed;
  j["edge_probability"] = result.scenario.edge_probability;
  j["graph_file"] =
      result.scenario.graph_file ? result.scenario.graph_file->string() : std::string();
  j["network"] = result.network_edges;

  ordered_json records = ordered_json::array();
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const RunRecord& r = result.records[i];
    ordered_json rec;
    rec["algorithm"] = r.tag;
    rec["params"] = params_json(r);
    rec["status"] = to_string(r.status);
    rec["iterations"] = r.iterations;
    rec["iteration_budget"] = r.iteration_budget;
    rec["final_rel_error"] = r.final_rel_error;
    rec["gamma"] = r.gamma ? ordered_json(*r.gamma) : ordered_json(nullptr);
    rec["trace_file"] = names[i];
    rec["best"] = r.best;
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);

  ordered_json summary = ordered_json::array();
  for (const AlgorithmSummary& s : result.summary) {
    ordered_json e;
    e["algorithm"] = s.tag;
    e["status"] = to_string(s.status);
    e["iterations_to_target"] =
        s.status == RunStatus::kReached ? ordered_json(s.iterations) : ordered_json(nullptr);
    e["final_rel_error"] = s.final_rel_error;
    e["best_params"] = params_json(result.records[s.best_record]);
    summary.push_back(std::move(e));
  }
  j["summary"] = std::move(summary);
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const std::filesystem::path& out_dir) {
  if (result.records.empty()) throw ConfigError("emit_results: no records");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }

  std::vector<std::filesystem::path> manifest;
  const std::vector<std::string> names = trace_names(result);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    std::ostringstream os;
    os << std::setprecision(17) << "iter,rel_error\n";
    for (const auto& [iter, err] : result.records[i].trace) os << iter << ',' << err << '\n';
    const auto path = out_dir / names[i];
    write_file(path, os.str());
    manifest.push_back(path);
  }

  const auto summary_path = out_dir / "summary.json";
  write_file(summary_path, summary_to_json(result));
  manifest.push_back(summary_path);

  std::ostringstream longs;
  longs << std::setprecision(17) << "algorithm,iter,rel_error\n";
  for (const AlgorithmSummary& s : result.summary) {
    for (const auto& [iter, err] : result.records[s.best_record].trace) {
      longs << s.tag << ',' << iter << ',' << err << '\n';
    }
  }
  const auto long_path = out_dir / "convergence_long.csv";
  write_file(long_path, longs.str());
  manifest.push_back(long_path);
  return manifest;
}

}  // namespace saddlekit
