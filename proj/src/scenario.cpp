#include <sstream>

#include "saddlekit/experiment.hpp"

namespace saddlekit {

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kWellConditioned: return "WELL_CONDITIONED";
    case Scenario::kIllConditioned: return "ILL_CONDITIONED";
    case Scenario::kNonconvexLocal: return "NONCONVEX_LOCAL";
  }
  return "UNKNOWN";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "well" || name == "WELL_CONDITIONED") return Scenario::kWellConditioned;
  if (name == "ill" || name == "ILL_CONDITIONED") return Scenario::kIllConditioned;
  if (name == "nonconvex" || name == "NONCONVEX_LOCAL") return Scenario::kNonconvexLocal;
  throw ConfigError("unknown scenario '" + name + "' (expected well|ill|nonconvex)");
}

void ScenarioSpec::validate() const {
  if (agents < 2) throw ConfigError("scenario: K must be >= 2");
  if (dim < 1) throw ConfigError("scenario: M must be >= 1");
  if (!graph_file && !(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw ConfigError("scenario: edge probability must be in (0, 1]");
  }
  if (max_attempts < 1) throw ConfigError("scenario: max_attempts must be >= 1");
}

namespace {

// Stream separation between the graph draw and the cost draws.
constexpr std::uint64_t kCostStream = 0x9E3779B97F4A7C15ULL;

std::vector<QuadraticCost> draw_costs(const ScenarioSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const int k_count = spec.agents;
  const Eigen::Index m = spec.dim;
  std::vector<Vector> diagonals;
  std::vector<Vector> linear;
  diagonals.reserve(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    Vector r(m);
    for (Eigen::Index j = 0; j < m; ++j) r(j) = rng.uniform(0.0, 2.0);
    linear.push_back(std::move(r));

    Vector diag(m);
    const Eigen::Index own = k % m;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (spec.scenario == Scenario::kWellConditioned) {
        diag(j) = static_cast<double>(rng.uniform_int(6, 8));
      } else if (j == own) {
        diag(j) = rng.uniform(2.0, 8.0);
      } else {
        diag(j) = rng.uniform_open(0.0, 1.0);
      }
    }
    diagonals.push_back(std::move(diag));
  }
  if (spec.scenario == Scenario::kNonconvexLocal) {
    for (int k = 1; k < k_count; ++k) {
      const Eigen::Index prev = (k - 1) % m;
      diagonals[k](prev) = -diagonals[k - 1](prev) / 2.0;
    }
  }
  std::vector<QuadraticCost> costs;
  costs.reserve(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    costs.emplace_back(Matrix(diagonals[k].asDiagonal()), std::move(linear[k]));
  }
  return costs;
}

}  // namespace

GeneratedScenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::uint64_t graph_seed = spec.seed;
  std::optional<Network> network;
  if (spec.graph_file) {
    network = load_network(*spec.graph_file);
    if (network->node_count() != spec.agents) {
      throw ConfigError("graph file has " + std::to_string(network->node_count()) +
                        " nodes but K = " + std::to_string(spec.agents));
    }
    if (!network->connected()) throw ConfigError("graph file network is not connected");
  } else {
    GeneratedNetwork g = erdos_renyi(spec.agents, spec.edge_probability, spec.seed,
                                     spec.max_attempts);
    graph_seed = g.seed_used;
    network = std::move(g.network);
  }

  double worst = 0.0;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    const std::uint64_t cost_seed = (spec.seed ^ kCostStream) + static_cast<std::uint64_t>(attempt);
    std::vector<QuadraticCost> costs = draw_costs(spec, cost_seed);
    MultiAgentProblem problem(*network, std::move(costs));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(problem.aggregate_hessian(),
                                              Eigen::EigenvaluesOnly);
    worst = eig.eigenvalues().minCoeff();
    if (worst > 0.0) return {std::move(problem), graph_seed, cost_seed};
  }
  std::ostringstream os;
  os << "scenario " << to_string(spec.scenario) << ": aggregate Hessian not positive "
     << "definite after " << spec.max_attempts << " draws (last lambda_min = " << worst
     << ", K = " << spec.agents << ", M = " << spec.dim << ")";
  throw ConfigError(os.str());
}

}  // namespace saddlekit
