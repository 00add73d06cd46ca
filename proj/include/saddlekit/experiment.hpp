#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "saddlekit/consensus.hpp"

namespace saddlekit {

enum class Scenario { kWellConditioned, kIllConditioned, kNonconvexLocal };

std::string to_string(Scenario scenario);
// Accepts "well", "ill", "nonconvex" and the long names.
Scenario scenario_from_string(const std::string& name);

struct ScenarioSpec {
  Scenario scenario = Scenario::kWellConditioned;
  int agents = 20;
  int dim = 20;
  std::uint64_t seed = 1;
  double edge_probability = 0.3;
  // When set, the topology is read from this edge-list file.
  std::optional<std::filesystem::path> graph_file;
  int max_attempts = 100;

  void validate() const;
};

struct GeneratedScenario {
  MultiAgentProblem problem;
  std::uint64_t graph_seed = 0;     // seed that produced a connected graph
  std::uint64_t problem_seed = 0;   // seed that produced the cost draws
};

// Deterministic for a fixed spec. Agent k's distinguished coordinate is
// k mod M.
GeneratedScenario generate_scenario(const ScenarioSpec& spec);

// Algorithm entry of an experiment: the kind plus, for the PD family, rho.
struct AlgorithmChoice {
  DistributedAlgorithm algorithm = DistributedAlgorithm::kPrimalDual;
  double rho = 0.0;

  // "PD_DIST", "AL_PD_DIST(rho=10)", "EXTRA", ...
  std::string tag() const;
};

// Parses "PD,AL,EXTRA,ED,DIFFUSION,DIGING,DLM" style lists; AL expands over
// `rho_sweep` (zero entries skipped).
std::vector<AlgorithmChoice> parse_algorithms(const std::string& list,
                                              const std::vector<double>& rho_sweep);

// Geometric grid anchor * 10^(-j / per_decade), j = 0 .. per_decade*decades - 1.
struct StepGrid {
  int per_decade = 8;
  int decades = 3;

  std::vector<double> values(double anchor) const;
  // "PER_DECADE:DECADES", e.g. "8:3".
  static StepGrid parse(const std::string& text);
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<AlgorithmChoice> algorithms;
  StepGrid grid;
  int max_iterations = 100000;
  double target_error = 1e-8;
  // Keep every stride-th relative error in memory for trace emission; 0 keeps
  // none.
  int trace_stride = 1;

  void validate() const;
};

struct RunRecord {
  std::string tag;
  AlgorithmChoice choice;
  AlgorithmParams params;
  RunStatus status = RunStatus::kNotReached;
  int iterations = 0;             // to target when reached, else iterations run
  int iteration_budget = 0;       // cap this run was given
  double final_rel_error = 0.0;
  std::optional<double> gamma;    // certified rate when the steps are admissible
  std::vector<std::pair<int, double>> trace;  // (iteration, rel_error)
  bool best = false;
};

struct AlgorithmSummary {
  std::string tag;
  RunStatus status = RunStatus::kNotReached;
  int iterations = 0;
  double final_rel_error = 0.0;
  std::size_t best_record = 0;
};

struct ExperimentResult {
  ScenarioSpec scenario;
  std::uint64_t graph_seed = 0;
  std::uint64_t problem_seed = 0;
  std::string network_edges;  // edge-list text of the topology used
  std::vector<RunRecord> records;
  std::vector<AlgorithmSummary> summary;

  const AlgorithmSummary* find(const std::string& tag) const;
};

// Grid-searches every algorithm's parameters and marks the best grid point
// (fewest iterations to target; ties go to the smaller step). Grid points are
// visited from the largest step down and each run is capped at the best
// count found so far, so later runs that cannot win stop early as NOT_REACHED.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Same as run_experiment but on an already generated problem.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const GeneratedScenario& generated);

// Writes one trace CSV per record, summary.json, and the long-format CSV
// "algorithm,iter,rel_error". Returns the written paths (traces first).
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const std::filesystem::path& out_dir);

std::string summary_to_json(const ExperimentResult& result);

}  // namespace saddlekit
