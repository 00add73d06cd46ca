#include <cmath>

#include "saddlekit/consensus.hpp"
#include "saddlekit/reference.hpp"

namespace saddlekit {

std::string to_string(DistributedAlgorithm algorithm) {
  switch (algorithm) {
    case DistributedAlgorithm::kPrimalDual: return "PD_DIST";
    case DistributedAlgorithm::kExtra: return "EXTRA";
    case DistributedAlgorithm::kExactDiffusion: return "EXACT_DIFFUSION";
    case DistributedAlgorithm::kDiffusion: return "DIFFUSION";
    case DistributedAlgorithm::kDiging: return "DIGING";
    case DistributedAlgorithm::kDlm: return "DLM";
  }
  return "UNKNOWN";
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kReached: return "REACHED";
    case RunStatus::kNotReached: return "NOT_REACHED";
    case RunStatus::kDiverged: return "DIVERGED";
  }
  return "UNKNOWN";
}

bool DistributedState::finite() const {
  return primal.allFinite() && dual.allFinite();
}

DistributedState distributed_pd_step(const MultiAgentProblem& problem,
                                     const ConsensusOperators& ops, double mu_w,
                                     double mu_lambda, double rho,
                                     const DistributedState& state) {
  if (state.primal.size() != ops.stacked_dim() || state.dual.size() != ops.stacked_dim()) {
    throw ConfigError("distributed_pd_step: state dimensions do not match");
  }
  if (!(rho >= 0.0)) throw ConfigError("distributed_pd_step: rho must be nonnegative");
  DistributedState next;
  Vector grad = problem.stacked_gradient(state.primal);
  if (rho != 0.0) grad += rho * ops.consensus_gap(state.primal);
  next.primal = state.primal - mu_w * grad - mu_w * state.dual;
  next.dual = state.dual + mu_lambda * ops.consensus_gap(next.primal);
  next.iteration = state.iteration + 1;
  return next;
}

DistributedState variant_step(DistributedAlgorithm algorithm,
                              const MultiAgentProblem& problem,
                              const ConsensusOperators& ops,
                              const AlgorithmParams& params,
                              const DistributedState& state) {
  if (algorithm == DistributedAlgorithm::kPrimalDual) {
    if (!(params.mu_w > 0.0) || !(params.mu_lambda > 0.0)) {
      throw ConfigError("variant_step: PD needs mu_w > 0 and mu_lambda > 0");
    }
    return distributed_pd_step(problem, ops, params.mu_w, params.mu_lambda, params.rho,
                               state);
  }
  if (algorithm == DistributedAlgorithm::kDlm) {
    if (!(params.c > 0.0) || !(params.d > 0.0)) {
      throw ConfigError("variant_step: DLM needs c > 0 and d > 0");
    }
  } else if (!(params.mu > 0.0)) {
    throw ConfigError("variant_step: step size mu must be positive");
  }
  if (state.primal.size() != ops.stacked_dim()) {
    throw ConfigError("variant_step: primal dimension does not match");
  }
  const bool has_dual = algorithm != DistributedAlgorithm::kDiffusion;
  if (has_dual && state.dual.size() != ops.stacked_dim()) {
    throw ConfigError("variant_step: dual dimension does not match");
  }
  const Vector& w = state.primal;
  const Vector& y = state.dual;
  const double mu = params.mu;

  DistributedState next;
  next.iteration = state.iteration + 1;
  switch (algorithm) {
    case DistributedAlgorithm::kExtra:
      next.primal = ops.half_mix(w) - mu * problem.stacked_gradient(w) - mu * y;
      next.dual = y + (0.5 / mu) * ops.consensus_gap(next.primal);
      break;
    case DistributedAlgorithm::kExactDiffusion:
      next.primal = ops.half_mix(w - mu * problem.stacked_gradient(w)) - mu * y;
      next.dual = y + (0.5 / mu) * ops.consensus_gap(next.primal);
      break;
    case DistributedAlgorithm::kDiffusion:
      next.primal = ops.mix(w - mu * problem.stacked_gradient(w));
      break;
    case DistributedAlgorithm::kDiging:
      // The dual here is lambda itself; B^2 lambda is one more neighbor exchange.
      next.primal = ops.mix(ops.mix(w)) - mu * problem.stacked_gradient(w) -
                    mu * ops.consensus_gap(y);
      next.dual = y + (1.0 / mu) * ops.consensus_gap(next.primal);
      break;
    case DistributedAlgorithm::kDlm:
      next.primal = w - (1.0 / params.d) * (problem.stacked_gradient(w) +
                                            params.c * ops.apply_laplacian(w) + y);
      next.dual = y + params.c * ops.apply_laplacian(next.primal);
      break;
    case DistributedAlgorithm::kPrimalDual:
      break;
  }
  return next;
}

DistributedState initial_state(DistributedAlgorithm algorithm,
                               const MultiAgentProblem& problem) {
  const Eigen::Index n = problem.agents() * problem.block_dim();
  DistributedState s;
  s.primal = Vector::Zero(n);
  s.dual = algorithm == DistributedAlgorithm::kDiffusion ? Vector() : Vector::Zero(n);
  return s;
}

DistributedRun run_distributed(DistributedAlgorithm algorithm,
                               const MultiAgentProblem& problem,
                               const ConsensusOperators& ops,
                               const AlgorithmParams& params,
                               const DistributedRunOptions& options) {
  if (options.max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  const Vector w_star = problem.stacked_minimizer();
  const double denom = std::max(w_star.squaredNorm(), 1e-300);
  auto rel_error = [&](const DistributedState& s) {
    return (s.primal - w_star).squaredNorm() / denom;
  };

  DistributedRun run;
  DistributedState state = initial_state(algorithm, problem);
  double err = rel_error(state);
  if (options.trace_stride > 0) run.trace.emplace_back(0, err);
  if (err <= options.target_error) {
    run.status = RunStatus::kReached;
    run.final_rel_error = err;
    run.final_state = state;
    return run;
  }

  for (int i = 1; i <= options.max_iterations; ++i) {
    DistributedState next = variant_step(algorithm, problem, ops, params, state);
    const bool finite = next.finite();
    const bool blown = !finite || next.primal.norm() > options.divergence_threshold ||
                       next.dual.norm() > options.divergence_threshold;
    if (blown) {
      run.status = RunStatus::kDiverged;
      run.iterations = i;
      run.final_rel_error = finite ? rel_error(next) : std::numeric_limits<double>::infinity();
      if (finite && options.trace_stride > 0) run.trace.emplace_back(i, run.final_rel_error);
      run.final_state = finite ? std::move(next) : std::move(state);
      return run;
    }
    state = std::move(next);
    err = rel_error(state);
    const bool reached = err <= options.target_error;
    if (options.trace_stride > 0 &&
        (i % options.trace_stride == 0 || reached || i == options.max_iterations)) {
      run.trace.emplace_back(i, err);
    }
    if (reached) {
      run.status = RunStatus::kReached;
      run.iterations = i;
      run.final_rel_error = err;
      run.final_state = std::move(state);
      return run;
    }
  }
  run.status = RunStatus::kNotReached;
  run.iterations = options.max_iterations;
  run.final_rel_error = err;
  run.final_state = std::move(state);
  return run;
}

Vector optimal_dual(DistributedAlgorithm algorithm, const MultiAgentProblem& problem,
                    const ConsensusOperators& ops, const AlgorithmParams& /*params*/) {
  const Vector grad = problem.stacked_gradient(problem.stacked_minimizer());
  switch (algorithm) {
    case DistributedAlgorithm::kPrimalDual:
    case DistributedAlgorithm::kExtra:
    case DistributedAlgorithm::kDlm:
      return -grad;
    case DistributedAlgorithm::kExactDiffusion:
      return -ops.half_mix(grad);
    case DistributedAlgorithm::kDiging:
      return range_space_dual(grad, ops.b_sq);
    case DistributedAlgorithm::kDiffusion:
      return Vector();
  }
  return Vector();
}

}  // namespace saddlekit
