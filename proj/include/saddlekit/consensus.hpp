#pragma once

#include <memory>
#include <string>
#include <vector>

#include "saddlekit/network.hpp"
#include "saddlekit/problem.hpp"
#include "saddlekit/rates.hpp"

namespace saddlekit {

// Network operators on stacked vectors col{w_1, ..., w_K}, w_k in R^M.
//
// The dense matrices are materialized for analysis and for the stacked
// centralized form; the distributed recursions use the neighbor-local
// routines below instead.
struct ConsensusOperators {
  Network network;
  CombinationMatrix combination;
  Eigen::Index block_dim = 0;

  Matrix b_op;       // (I_K - A)^{1/2} kron I_M
  Matrix b_sq;       // (I_K - A) kron I_M
  Matrix a_bar;      // (I + A kron I_M) / 2
  Matrix laplacian;  // (D - Adj) kron I_M

  Eigen::Index agents() const { return network.node_count(); }
  Eigen::Index stacked_dim() const { return agents() * block_dim; }

  // Agent-local evaluations; block k reads only blocks of k's neighbors.
  // col{sum_s a_sk w_s}
  Vector mix(const Vector& stacked) const;
  // col{w_k - sum_s a_sk w_s}, i.e. b_sq * w
  Vector consensus_gap(const Vector& stacked) const;
  // col{(w_k + sum_s a_sk w_s) / 2}, i.e. a_bar * w
  Vector half_mix(const Vector& stacked) const;
  // col{sum_{s in N_k} (w_k - w_s)}
  Vector apply_laplacian(const Vector& stacked) const;
};

// Throws ConfigError when I - A has an eigenvalue below -1e-10 or the
// combination matrix fails its invariants.
ConsensusOperators build_consensus_operators(const Network& network,
                                             const CombinationMatrix& a,
                                             Eigen::Index block_dim);

// Distance of a stacked vector to the consensus subspace {1 kron v}.
double distance_to_consensus(const Vector& stacked, Eigen::Index block_dim);

// K agents with quadratic costs over R^M; solves min sum_k J_k(w).
class MultiAgentProblem {
 public:
  MultiAgentProblem(Network network, std::vector<QuadraticCost> agent_costs);

  const Network& network() const { return network_; }
  const std::vector<QuadraticCost>& agent_costs() const { return costs_; }
  Eigen::Index agents() const { return static_cast<Eigen::Index>(costs_.size()); }
  Eigen::Index block_dim() const { return costs_.front().dim(); }

  // col{grad J_k(w_k)}, evaluated block by block.
  Vector stacked_gradient(const Vector& stacked) const;
  // Equivalent problem over KM variables with constraint B_op w = 0.
  EqualityConstrainedProblem stacked_problem(const ConsensusOperators& ops) const;

  // Minimizer of the aggregate cost, and its K-fold stack.
  Vector aggregate_minimizer() const;
  Vector stacked_minimizer() const;

  // Common smoothness delta = max_k lambda_max(2 R_k).
  double smoothness() const;
  // beta_k = lambda_min(2 R_k); negative for non-convex agents.
  std::vector<double> agent_strong_convexity() const;
  // Strong convexity of (1/K) sum_k J_k: lambda_min((1/K) sum_k 2 R_k).
  double aggregate_strong_convexity() const;
  // Hessian of the aggregate sum, sum_k 2 R_k.
  Matrix aggregate_hessian() const;

 private:
  Network network_;
  std::vector<QuadraticCost> costs_;
};

// Stacked primal and dual. The dual is y = B_op lambda for the PD family,
// EXTRA and exact diffusion, lambda itself for DIGing, y for DLM, and unused
// (empty) for diffusion.
struct DistributedState {
  Vector primal;
  Vector dual;
  int iteration = 0;

  bool finite() const;
};

enum class DistributedAlgorithm {
  kPrimalDual,  // PD (rho = 0) or AL-PD (rho > 0)
  kExtra,
  kExactDiffusion,
  kDiffusion,
  kDiging,
  kDlm,
};

std::string to_string(DistributedAlgorithm algorithm);

struct AlgorithmParams {
  // kPrimalDual
  double mu_w = 0.0;
  double mu_lambda = 0.0;
  double rho = 0.0;
  // EXTRA, exact diffusion, diffusion, DIGing
  double mu = 0.0;
  // DLM
  double c = 0.0;
  double d = 0.0;
};

// One synchronous round of
//   w_i = w - mu_w (grad J(w) + rho B^2 w) - mu_w y
//   y_i = y + mu_l B^2 w_i
DistributedState distributed_pd_step(const MultiAgentProblem& problem,
                                     const ConsensusOperators& ops, double mu_w,
                                     double mu_lambda, double rho,
                                     const DistributedState& state);

// One synchronous round of the named algorithm. Non-finite output is left for
// the caller (run_distributed) to detect.
DistributedState variant_step(DistributedAlgorithm algorithm,
                              const MultiAgentProblem& problem,
                              const ConsensusOperators& ops,
                              const AlgorithmParams& params,
                              const DistributedState& state);

// Dual initialization used by run_distributed: zero of the right size.
DistributedState initial_state(DistributedAlgorithm algorithm,
                               const MultiAgentProblem& problem);

enum class RunStatus { kReached, kNotReached, kDiverged };

std::string to_string(RunStatus status);

struct DistributedRunOptions {
  int max_iterations = 100000;
  double target_error = 1e-8;
  double divergence_threshold = 1e8;
  // Keep every stride-th relative error; 0 keeps none.
  int trace_stride = 1;
};

struct DistributedRun {
  RunStatus status = RunStatus::kNotReached;
  // Iterations to reach the target, or the number run otherwise.
  int iterations = 0;
  double final_rel_error = 0.0;
  std::vector<std::pair<int, double>> trace;  // (iteration, rel_error)
  DistributedState final_state;               // last finite state
};

// Runs from the zero state, tracking ||w_i - w*||^2 / ||w*||^2 against the
// stacked aggregate minimizer.
DistributedRun run_distributed(DistributedAlgorithm algorithm,
                               const MultiAgentProblem& problem,
                               const ConsensusOperators& ops,
                               const AlgorithmParams& params,
                               const DistributedRunOptions& options);

// The dual value at which the consensus optimum is a fixed point.
Vector optimal_dual(DistributedAlgorithm algorithm, const MultiAgentProblem& problem,
                    const ConsensusOperators& ops, const AlgorithmParams& params);

// Lower bound on the strong convexity (w.r.t. the optimum) of the penalized
// cost sum_k J_k(w_k) + rho/2 ||w||^2_{B^2}, maximized over eta.
struct NuRhoEstimate {
  double nu_rho = 0.0;
  double eta_star = 0.0;
  // The bound is nondecreasing in rho and tends to beta_bar.
  bool limit_consistent = false;
};

// min{beta - 2 delta eta, rho s eta^2 / (4 (eta^2 + 1))} for eta in (0, beta/(2 delta)).
double nu_rho_bound(double beta_bar, double delta, double sigma_underbar_sq,
                    double rho, double eta);

NuRhoEstimate nu_rho_estimate(double beta_bar, double delta,
                              double sigma_underbar_sq, double rho);

struct DistributedRateReport {
  double rho = 0.0;
  RegularityConstants constants;
  RateReport rate;  // gamma_L for rho = 0, gamma_AL for rho > 0
  double kappa_l = 0.0;   // delta / nu_0, 0 when some beta_k <= 0
  double kappa_al = 0.0;  // delta_rho / nu_rho, 0 for rho = 0
  double eta_star = 0.0;  // rho > 0 only
};

// Certified linear rate for the distributed PD recursion. Throws
// AssumptionError when the regularity the regime needs fails, and ConfigError
// for inadmissible steps.
DistributedRateReport distributed_rate_report(const MultiAgentProblem& problem,
                                              const ConsensusOperators& ops,
                                              double rho, double mu_w,
                                              double mu_lambda);

// Regularity constants of the regime (rho = 0: delta, min_k beta_k;
// rho > 0: delta_rho, nu_rho from nu_rho_estimate).
RegularityConstants distributed_constants(const MultiAgentProblem& problem,
                                          const ConsensusOperators& ops,
                                          double rho);

// Spectral summary of B_op.
SpectralInfo consensus_spectrum(const ConsensusOperators& ops);

}  // namespace saddlekit
