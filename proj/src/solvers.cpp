#include "saddlekit/solvers.hpp"

#include <cmath>
#include <sstream>

#include "saddlekit/spectral.hpp"

namespace saddlekit {

std::string to_string(Method method) {
  switch (method) {
    case Method::kIncremental: return "inc";
    case Method::kNonIncremental: return "noninc";
    case Method::kForwardBackward: return "fb";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "inc" || name == "incremental") return Method::kIncremental;
  if (name == "noninc" || name == "nonincremental") return Method::kNonIncremental;
  if (name == "fb" || name == "forward_backward") return Method::kForwardBackward;
  throw ConfigError("unknown method '" + name + "' (expected inc|noninc|fb)");
}

std::string to_string(TerminationStatus status) {
  switch (status) {
    case TerminationStatus::kRunning: return "RUNNING";
    case TerminationStatus::kConverged: return "CONVERGED";
    case TerminationStatus::kMaxIterations: return "MAX_ITER";
    case TerminationStatus::kDiverged: return "DIVERGED";
  }
  return "UNKNOWN";
}

void SolverConfig::validate() const {
  if (!(mu_w > 0.0)) throw ConfigError("mu_w must be strictly positive");
  if (!(mu_lambda > 0.0)) throw ConfigError("mu_lambda must be strictly positive");
  if (!(penalty >= 0.0)) throw ConfigError("penalty (rho/eta) must be nonnegative");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(stop_tolerance >= 0.0)) throw ConfigError("stop_tolerance must be nonnegative");
  if (!(divergence_threshold > 0.0)) {
    throw ConfigError("divergence_threshold must be positive");
  }
}

bool SolverState::finite() const { return w.allFinite() && lambda.allFinite(); }

namespace {

void check_dims(const EqualityConstrainedProblem& problem, const SolverState& state) {
  if (state.w.size() != problem.dim_primal() ||
      state.lambda.size() != problem.dim_constraints()) {
    throw ConfigError("solver state dimensions do not match the problem");
  }
}

SolverState finish_step(SolverState next, const SolverState& previous,
                        const char* name) {
  next.iteration = previous.iteration + 1;
  if (!next.finite()) {
    throw DivergenceError(std::string(name) + ": non-finite iterate", previous);
  }
  return next;
}

}  // namespace

SolverState incremental_step(const EqualityConstrainedProblem& problem, double mu_w,
                             double mu_lambda, double rho, const SolverState& state) {
  check_dims(problem, state);
  if (!(rho >= 0.0)) throw ConfigError("incremental_step: rho must be nonnegative");
  const Matrix& B = problem.constraint_matrix();
  SolverState next;
  next.w = state.w - mu_w * (problem.augmented_gradient(state.w, rho) +
                             B.transpose() * state.lambda);
  next.lambda = state.lambda + mu_lambda * problem.constraint_residual(next.w);
  return finish_step(std::move(next), state, "incremental_step");
}

SolverState nonincremental_step(const EqualityConstrainedProblem& problem,
                                double mu_w, double mu_lambda, double eta,
                                const SolverState& state) {
  check_dims(problem, state);
  if (!(eta >= 0.0)) throw ConfigError("nonincremental_step: eta must be nonnegative");
  const Matrix& B = problem.constraint_matrix();
  SolverState next;
  next.w = state.w - mu_w * (problem.augmented_gradient(state.w, eta) +
                             B.transpose() * state.lambda);
  next.lambda = state.lambda + mu_lambda * problem.constraint_residual(state.w);
  return finish_step(std::move(next), state, "nonincremental_step");
}

SolverState forward_backward_step(const EqualityConstrainedProblem& problem,
                                  double mu_w, double mu_lambda,
                                  const SolverState& state) {
  check_dims(problem, state);
  if (!problem.constraint_rhs().isZero(0.0)) {
    throw ConfigError("forward-backward requires homogeneous constraint (b = 0)");
  }
  const Matrix& B = problem.constraint_matrix();
  SolverState next;
  next.w = state.w - mu_w * (problem.cost().gradient(state.w) +
                             B.transpose() * state.lambda);
  next.lambda = state.lambda + mu_lambda * (B * (2.0 * next.w - state.w));
  return finish_step(std::move(next), state, "forward_backward_step");
}

SolverState apply_step(Method method, const EqualityConstrainedProblem& problem,
                       const SolverConfig& config, const SolverState& state) {
  switch (method) {
    case Method::kIncremental:
      return incremental_step(problem, config.mu_w, config.mu_lambda, config.penalty,
                              state);
    case Method::kNonIncremental:
      return nonincremental_step(problem, config.mu_w, config.mu_lambda,
                                 config.penalty, state);
    case Method::kForwardBackward:
      return forward_backward_step(problem, config.mu_w, config.mu_lambda, state);
  }
  throw ConfigError("unknown method");
}

void Trace::append(const TraceRecord& record) {
  if (!records_.empty() && record.iteration <= records_.back().iteration) {
    throw std::logic_error("trace records must be strictly increasing");
  }
  records_.push_back(record);
}

void Trace::finish(TerminationStatus status) {
  if (status_ != TerminationStatus::kRunning) {
    throw std::logic_error("trace status already set");
  }
  if (status == TerminationStatus::kRunning) {
    throw std::logic_error("cannot finish a trace as RUNNING");
  }
  status_ = status;
}

Trace run_solver(const EqualityConstrainedProblem& problem,
                 const SolverConfig& config, Method method,
                 const RunOptions& options) {
  config.validate();
  const Eigen::Index m = problem.dim_primal();
  const Eigen::Index e = problem.dim_constraints();

  SolverState state;
  state.w = config.w_init.size() == 0 ? Vector::Zero(m) : config.w_init;
  state.lambda = config.lambda_init.size() == 0 ? Vector::Zero(e) : config.lambda_init;
  if (state.w.size() != m || state.lambda.size() != e) {
    throw ConfigError("initial iterate dimensions do not match the problem");
  }
  if (method == Method::kForwardBackward && !problem.constraint_rhs().isZero(0.0)) {
    throw ConfigError("forward-backward requires homogeneous constraint (b = 0)");
  }

  const std::optional<SaddleReference>& ref = options.reference;
  if (ref && (ref->w_star.size() != m || ref->lambda_star_b.size() != e)) {
    throw ConfigError("reference dimensions do not match the problem");
  }

  LyapunovWeights weights;
  if (options.weights) {
    weights = *options.weights;
  } else {
    const double smax = spectral_quantities(problem.constraint_matrix()).sigma_max;
    weights.c_w = 1.0 - config.mu_w * config.mu_lambda * smax * smax;
    weights.c_lambda = config.mu_w / config.mu_lambda;
  }
  const Vector dual_ref = options.dual_reference
                              ? *options.dual_reference
                              : (ref ? ref->lambda_star_b : Vector::Zero(e));
  const RangeProjector projector(problem.constraint_matrix());
  const double w_star_sq = ref ? ref->w_star.squaredNorm() : 0.0;

  Trace trace;
  trace.set_has_errors(ref.has_value());

  auto record = [&](const SolverState& s) {
    TraceRecord r;
    r.iteration = s.iteration;
    r.range_residual = projector.residual(s.lambda);
    if (ref) {
      r.primal_err_sq = (s.w - ref->w_star).squaredNorm();
      r.dual_err_sq = (s.lambda - dual_ref).squaredNorm();
      r.lyapunov = weights.c_w * r.primal_err_sq + weights.c_lambda * r.dual_err_sq;
      r.rel_error = w_star_sq > 0.0 ? r.primal_err_sq / w_star_sq : r.primal_err_sq;
    }
    trace.append(r);
    return r;
  };

  auto exceeded = [&](const SolverState& s) {
    return !(s.w.norm() <= config.divergence_threshold &&
             s.lambda.norm() <= config.divergence_threshold);
  };

  const TraceRecord first = record(state);
  if (config.stop_tolerance > 0.0 && ref && first.rel_error <= config.stop_tolerance &&
      first.dual_err_sq <= config.stop_tolerance * (1.0 + dual_ref.squaredNorm())) {
    trace.set_final_state(state);
    trace.finish(TerminationStatus::kConverged);
    return trace;
  }

  for (int i = 0; i < config.max_iterations; ++i) {
    SolverState next;
    try {
      next = apply_step(method, problem, config, state);
    } catch (const DivergenceError& err) {
      trace.set_final_state(err.last_finite());
      trace.finish(TerminationStatus::kDiverged);
      return trace;
    }
    if (exceeded(next)) {
      record(next);
      trace.set_final_state(next);
      trace.finish(TerminationStatus::kDiverged);
      return trace;
    }
    const TraceRecord r = record(next);
    const double displacement = (next.w - state.w).norm() / (1.0 + next.w.norm());
    state = std::move(next);
    // A zero tolerance runs the full budget.
    const bool converged = config.stop_tolerance > 0.0 &&
        (ref ? r.rel_error <= config.stop_tolerance : displacement <= config.stop_tolerance);
    if (converged) {
      trace.set_final_state(state);
      trace.finish(TerminationStatus::kConverged);
      return trace;
    }
  }
  trace.set_final_state(state);
  trace.finish(TerminationStatus::kMaxIterations);
  return trace;
}

}  // namespace saddlekit
