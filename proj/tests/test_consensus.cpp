#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "saddlekit/consensus.hpp"
#include "saddlekit/solvers.hpp"
#include "saddlekit/spectral.hpp"
#include "support.hpp"

namespace saddlekit {
namespace {

using testing::max_abs_diff;
using testing::random_multi_agent;

Network path(int k) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < k; ++i) edges.emplace_back(i, i + 1);
  return Network(k, edges);
}

// K = 2, M = 1, J_k(w) = w^2 / 2.
MultiAgentProblem two_agent_problem() {
  std::vector<QuadraticCost> costs;
  for (int k = 0; k < 2; ++k) costs.emplace_back(Matrix::Constant(1, 1, 0.5), Vector::Zero(1));
  return MultiAgentProblem(path(2), std::move(costs));
}

Vector pair(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(Network, Validation) {
  EXPECT_THROW(Network(1, {}), ConfigError);
  EXPECT_THROW(Network(3, {{0, 0}}), ConfigError);
  EXPECT_THROW(Network(3, {{0, 3}}), ConfigError);
  const Network n(3, {{1, 0}, {0, 1}, {2, 1}});
  EXPECT_EQ(n.edges().size(), 2u);
  EXPECT_TRUE(n.adjacent(0, 1));
  EXPECT_FALSE(n.adjacent(0, 2));
  EXPECT_EQ(n.degree(1), 2);
  EXPECT_TRUE(n.connected());
  EXPECT_FALSE(Network(3, {{0, 1}}).connected());
}

TEST(Network, EdgeListRoundTrip) {
  const Network n = erdos_renyi(12, 0.3, 4).network;
  const Network back = network_from_edge_list(network_to_edge_list(n));
  EXPECT_EQ(back.edges(), n.edges());
  EXPECT_EQ(back.node_count(), 12);
  const auto file = std::filesystem::temp_directory_path() / "saddlekit_edges.txt";
  save_network(n, file);
  EXPECT_EQ(load_network(file).edges(), n.edges());
  std::filesystem::remove(file);
  EXPECT_THROW(load_network("/nonexistent/edges.txt"), IoError);
  EXPECT_THROW(network_from_edge_list("3\n0"), ConfigError);
}

TEST(Network, ErdosRenyiDeterministicAndConnected) {
  const auto a = erdos_renyi(20, 0.3, 9);
  const auto b = erdos_renyi(20, 0.3, 9);
  EXPECT_EQ(a.network.edges(), b.network.edges());
  EXPECT_EQ(a.seed_used, b.seed_used);
  EXPECT_TRUE(a.network.connected());
  EXPECT_THROW(erdos_renyi(5, 0.0, 1), ConfigError);
}

TEST(Metropolis, TwoNodePath) {
  const Matrix a = metropolis_weights(path(2)).weights;
  EXPECT_TRUE(a.isApprox(Matrix::Constant(2, 2, 0.5)));
}

TEST(Metropolis, ThreeNodePath) {
  const Matrix a = metropolis_weights(path(3)).weights;
  EXPECT_NEAR(a(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a(1, 2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(a(0, 2), 0.0);
}

TEST(Metropolis, CompleteGraph) {
  const Matrix a = metropolis_weights(Network(3, {{0, 1}, {1, 2}, {0, 2}})).weights;
  EXPECT_LE((a - Matrix::Constant(3, 3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Metropolis, DisconnectedRejected) {
  EXPECT_THROW(metropolis_weights(Network(4, {{0, 1}, {2, 3}})), ConfigError);
}

TEST(Metropolis, PropertyOnRandomGraphs) {
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    const int k = static_cast<int>(rng.uniform_int(2, 30));
    const Network n = testing::random_connected_network(rng, k, 0.3);
    const auto check = check_combination_matrix(metropolis_weights(n), n);
    EXPECT_TRUE(check.ok()) << "K = " << k;
    EXPECT_GT(check.second_smallest_eigenvalue, 0.0);
  }
}

TEST(CombinationCheck, IdentityIsNotPrimitive) {
  const Network n = path(3);
  CombinationMatrix a{Matrix::Identity(3, 3)};
  const auto check = check_combination_matrix(a, n);
  EXPECT_FALSE(check.primitive);
  EXPECT_FALSE(check.simple_zero_eigenvalue);
  EXPECT_THROW(build_consensus_operators(n, a, 1), ConfigError);
}

TEST(ConsensusOperators, RejectsNonPsd) {
  // Symmetric, doubly stochastic but with eigenvalue 1 + 0.5 of I - A > 1 and
  // a negative entry; I - A has a negative eigenvalue when A has one above 1.
  Matrix w(2, 2);
  w << 1.5, -0.5, -0.5, 1.5;
  try {
    build_consensus_operators(path(2), CombinationMatrix{w}, 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("not PSD"), std::string::npos) << e.what();
  }
}

TEST(ConsensusOperators, TwoNodeSquareRoot) {
  const Network n = path(2);
  const auto ops = build_consensus_operators(n, metropolis_weights(n), 1);
  Matrix expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LE((ops.b_op - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((ops.b_sq - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ConsensusOperators, StructuralIdentities) {
  Rng rng(3);
  for (int t = 0; t < 15; ++t) {
    const int k = static_cast<int>(rng.uniform_int(2, 12));
    const Eigen::Index m = rng.uniform_int(1, 4);
    const Network n = testing::random_connected_network(rng, k, 0.4);
    const auto ops = build_consensus_operators(n, metropolis_weights(n), m);
    EXPECT_LE((ops.b_op * ops.b_op - ops.b_sq).norm(), 1e-10 * ops.b_sq.norm());
    const Matrix eye = Matrix::Identity(k * m, k * m);
    EXPECT_LE((ops.a_bar - (eye - 0.5 * ops.b_sq)).cwiseAbs().maxCoeff(), 1e-15);

    // Local routines against the dense operators.
    const Vector w = rng.normal_vector(k * m);
    EXPECT_LE(max_abs_diff(ops.consensus_gap(w), ops.b_sq * w), 1e-13);
    EXPECT_LE(max_abs_diff(ops.half_mix(w), ops.a_bar * w), 1e-13);
    EXPECT_LE(max_abs_diff(ops.mix(w), w - ops.b_sq * w), 1e-13);
    EXPECT_LE(max_abs_diff(ops.apply_laplacian(w), ops.laplacian * w), 1e-13);

    // Consensus vectors are annihilated by B and the Laplacian.
    const Vector c = rng.normal_vector(m).replicate(k, 1);
    EXPECT_LE((ops.b_op * c).norm(), 1e-10 * (1.0 + c.norm()));
    EXPECT_LE((ops.laplacian * c).norm(), 1e-12 * (1.0 + c.norm()));

    // Off-consensus lower bound.
    const auto s = consensus_spectrum(ops);
    EXPECT_GE((ops.b_op * w).norm(),
              s.sigma_min_nonzero * distance_to_consensus(w, m) - 1e-9);
    EXPECT_GT((ops.b_op * w).norm(), 1e-6);
  }
}

TEST(MultiAgentProblem, StackedGradientAndMinimizer) {
  const auto p = random_multi_agent(1, 5, 3);
  const Vector w = Rng(4).normal_vector(15);
  const Vector g = p.stacked_gradient(w);
  for (int k = 0; k < 5; ++k) {
    EXPECT_LE(max_abs_diff(g.segment(3 * k, 3), p.agent_costs()[k].gradient(w.segment(3 * k, 3))),
              1e-14);
  }
  // The aggregate gradient vanishes at the minimizer.
  const Vector x = p.aggregate_minimizer();
  Vector sum = Vector::Zero(3);
  for (const auto& c : p.agent_costs()) sum += c.gradient(x);
  EXPECT_LE(sum.norm(), 1e-10);
}

TEST(MultiAgentProblem, StackedProblemMatchesConsensus) {
  const auto p = random_multi_agent(2, 4, 2);
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 2);
  const auto stacked = p.stacked_problem(ops);
  const auto ref = solve_kkt_reference(stacked);
  EXPECT_LE((ref.w_star - p.stacked_minimizer()).norm(), 1e-9);
}

TEST(NuRho, Example) {
  const auto est = nu_rho_estimate(1.0, 1.0, 1.0, 4.0);
  EXPECT_NEAR(est.eta_star, 0.423854, 1e-5);
  EXPECT_NEAR(est.nu_rho, 0.152292, 1e-5);
  EXPECT_TRUE(est.limit_consistent);
}

TEST(NuRho, SmallRhoVanishes) {
  EXPECT_LT(nu_rho_estimate(1.0, 1.0, 1.0, 1e-10).nu_rho, 1e-9);
}

TEST(NuRho, SweepNondecreasingBelowBeta) {
  double last = 0.0;
  for (double rho : {1.0, 10.0, 100.0, 1000.0}) {
    const double nu = nu_rho_estimate(2.0, 3.0, 0.5, rho).nu_rho;
    EXPECT_GE(nu, last);
    EXPECT_LT(nu, 2.0);
    last = nu;
  }
}

TEST(NuRho, RejectsNonPositive) {
  EXPECT_THROW(nu_rho_estimate(0.0, 1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(nu_rho_estimate(1.0, -1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(nu_rho_estimate(1.0, 1.0, 0.0, 1.0), ConfigError);
  EXPECT_THROW(nu_rho_estimate(1.0, 1.0, 1.0, 0.0), ConfigError);
}

TEST(DistributedPd, TwoAgentExample) {
  const auto p = two_agent_problem();
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 1);
  DistributedState s{pair(1, 0), pair(0, 0), 0};
  const auto next = distributed_pd_step(p, ops, 0.1, 0.1, 0.0, s);
  EXPECT_LE(max_abs_diff(next.primal, pair(0.9, 0.0)), 1e-15);
  EXPECT_LE(max_abs_diff(next.dual, pair(0.045, -0.045)), 1e-15);
}

TEST(Diffusion, TwoAgentExample) {
  const auto p = two_agent_problem();
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 1);
  AlgorithmParams params;
  params.mu = 0.1;
  DistributedState s{pair(1, 0), Vector(), 0};
  const auto next = variant_step(DistributedAlgorithm::kDiffusion, p, ops, params, s);
  EXPECT_LE(max_abs_diff(next.primal, pair(0.45, 0.45)), 1e-15);
}

TEST(VariantStep, RejectsBadParameters) {
  const auto p = two_agent_problem();
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 1);
  DistributedState s{pair(1, 0), pair(0, 0), 0};
  AlgorithmParams params;
  EXPECT_THROW(variant_step(DistributedAlgorithm::kExtra, p, ops, params, s), ConfigError);
  EXPECT_THROW(variant_step(DistributedAlgorithm::kDlm, p, ops, params, s), ConfigError);
  EXPECT_THROW(variant_step(DistributedAlgorithm::kPrimalDual, p, ops, params, s), ConfigError);
}

TEST(FixedPoints, AllAlgorithmsAtOptimum) {
  const auto p = random_multi_agent(5, 6, 3);
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 3);
  AlgorithmParams params;
  params.mu_w = 0.05;
  params.mu_lambda = 0.7;
  params.rho = 1.0;
  params.mu = 0.05;
  params.c = 0.3;
  params.d = 10.0;
  const Vector w_star = p.stacked_minimizer();
  for (auto alg : {DistributedAlgorithm::kPrimalDual, DistributedAlgorithm::kExtra,
                   DistributedAlgorithm::kExactDiffusion, DistributedAlgorithm::kDiging,
                   DistributedAlgorithm::kDlm}) {
    DistributedState s{w_star, optimal_dual(alg, p, ops, params), 0};
    const auto next = variant_step(alg, p, ops, params, s);
    EXPECT_LE(max_abs_diff(next.primal, w_star), 1e-10) << to_string(alg);
    EXPECT_LE(max_abs_diff(next.dual, s.dual), 1e-10) << to_string(alg);
  }
}

// Dense stacked incremental PD against the agent-local recursion with y = B lambda.
TEST(DistributedPd, MatchesDenseFormWithDualSubstitution) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = random_multi_agent(seed, 5, 2);
    const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 2);
    const auto stacked = p.stacked_problem(ops);
    const double rho = 0.5 * static_cast<double>(seed);
    SolverState dense{Vector::Zero(10), Vector::Zero(10), 0};
    DistributedState local{Vector::Zero(10), Vector::Zero(10), 0};
    for (int i = 0; i < 100; ++i) {
      dense = incremental_step(stacked, 0.05, 0.3, rho, dense);
      local = distributed_pd_step(p, ops, 0.05, 0.3, rho, local);
      ASSERT_LE(max_abs_diff(dense.w, local.primal), 1e-12);
      ASSERT_LE(max_abs_diff(ops.b_op * dense.lambda, local.dual), 1e-10);
    }
  }
}

TEST(RunDistributed, ConvergesOnStronglyConvexAgents) {
  const auto p = random_multi_agent(9, 6, 3);
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 3);
  const double delta = p.smoothness();
  AlgorithmParams params;
  params.mu = 0.5 / delta;
  DistributedRunOptions o;
  o.max_iterations = 20000;
  for (auto alg : {DistributedAlgorithm::kExtra, DistributedAlgorithm::kExactDiffusion,
                   DistributedAlgorithm::kDiging}) {
    const auto run = run_distributed(alg, p, ops, params, o);
    EXPECT_EQ(run.status, RunStatus::kReached) << to_string(alg);
    EXPECT_LE(run.final_rel_error, o.target_error);
  }
  // Diffusion stalls at a step-dependent bias.
  const auto run = run_distributed(DistributedAlgorithm::kDiffusion, p, ops, params, o);
  EXPECT_EQ(run.status, RunStatus::kNotReached);
}

TEST(RunDistributed, FlagsDivergence) {
  const auto p = random_multi_agent(9, 4, 2);
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 2);
  AlgorithmParams params;
  params.mu = 10.0 / p.smoothness();
  const auto run = run_distributed(DistributedAlgorithm::kExtra, p, ops, params, {});
  EXPECT_EQ(run.status, RunStatus::kDiverged);
  EXPECT_TRUE(run.final_state.finite());
}

TEST(DistributedRate, EqualAgentsUseCommonBeta) {
  std::vector<QuadraticCost> costs;
  for (int k = 0; k < 3; ++k) costs.emplace_back(Matrix::Identity(2, 2), Vector::Ones(2));
  const MultiAgentProblem p(path(3), std::move(costs));
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 2);
  const auto c = distributed_constants(p, ops, 0.0);
  EXPECT_NEAR(c.nu_rho, 2.0, 1e-14);
  EXPECT_NEAR(c.delta, 2.0, 1e-14);
  const auto r = distributed_rate_report(p, ops, 0.0, 0.1, 0.5);
  EXPECT_NEAR(r.kappa_l, 1.0, 1e-14);
  EXPECT_GT(r.rate.gamma, 0.0);
  EXPECT_LT(r.rate.gamma, 1.0);
}

TEST(DistributedRate, NonConvexAgentNeedsPenalty) {
  std::vector<QuadraticCost> costs;
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = -0.25;
  costs.emplace_back(bad, Vector::Zero(2));
  costs.emplace_back(Matrix::Identity(2, 2), Vector::Zero(2));
  const MultiAgentProblem p(path(2), std::move(costs));
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 2);
  EXPECT_THROW(distributed_rate_report(p, ops, 0.0, 0.01, 0.01), AssumptionError);
}

TEST(DistributedRate, AugmentedBetterConditionedOnIllConditionedAgents) {
  // One agent is barely strongly convex, the aggregate is well conditioned.
  std::vector<QuadraticCost> costs;
  Matrix weak = Matrix::Identity(2, 2);
  weak(1, 1) = 1e-3;
  Matrix strong = Matrix::Identity(2, 2) * 4.0;
  costs.emplace_back(weak, Vector::Zero(2));
  costs.emplace_back(strong, Vector::Ones(2));
  costs.emplace_back(strong, Vector::Ones(2));
  const MultiAgentProblem p(path(3), std::move(costs));
  const auto ops = build_consensus_operators(p.network(), metropolis_weights(p.network()), 2);
  const auto base = distributed_constants(p, ops, 0.0);
  const auto smax2 = std::pow(consensus_spectrum(ops).sigma_max, 2);
  const auto l = distributed_rate_report(p, ops, 0.0, 0.5 / base.delta_rho,
                                         base.nu_rho / smax2);
  const double rho = 10.0;
  const auto al_c = distributed_constants(p, ops, rho);
  const auto al = distributed_rate_report(p, ops, rho, 0.5 / al_c.delta_rho,
                                          al_c.nu_rho / smax2);
  EXPECT_LT(al.kappa_al, l.kappa_l);
  EXPECT_LT(al.rate.gamma, l.rate.gamma);
}

TEST(DistributedRate, NonConvexAgentsWithPenalty) {
  // Aggregate strongly convex although one agent is not.
  std::vector<QuadraticCost> costs;
  Matrix bad = Matrix::Identity(1, 1) * -0.5;
  costs.emplace_back(bad, Vector::Zero(1));
  costs.emplace_back(Matrix::Identity(1, 1) * 2.0, Vector::Ones(1));
  const MultiAgentProblem p(path(2), std::move(costs));
  EXPECT_GT(p.aggregate_strong_convexity(), 0.0);
  EXPECT_LT(p.agent_strong_convexity()[0], 0.0);
}

}  // namespace
}  // namespace saddlekit
