#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "saddlekit/problem.hpp"
#include "saddlekit/reference.hpp"

namespace saddlekit {

enum class Method { kIncremental, kNonIncremental, kForwardBackward };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct SolverConfig {
  double mu_w = 0.0;
  double mu_lambda = 0.0;
  // Penalty weight: rho for the incremental recursion, eta for the
  // non-incremental one. Ignored by forward-backward.
  double penalty = 0.0;
  int max_iterations = 1000;
  double divergence_threshold = 1e8;
  // Relative error target when a reference is given, otherwise the target on
  // ||w_i - w_{i-1}|| / (1 + ||w_i||).
  double stop_tolerance = 1e-10;  // 0 disables early stopping
  // Empty means zero.
  Vector w_init;
  Vector lambda_init;

  void validate() const;
};

// Primal-dual iterate. For the non-incremental and forward-backward
// recursions `lambda` holds their own dual variable lambda'.
struct SolverState {
  Vector w;
  Vector lambda;
  int iteration = 0;

  bool finite() const;
};

// Thrown by the step functions when the update produces non-finite values.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, SolverState last_finite)
      : std::runtime_error(what), last_finite_(std::move(last_finite)) {}

  const SolverState& last_finite() const { return last_finite_; }

 private:
  SolverState last_finite_;
};

// w_i = w - mu_w (grad J_rho(w) + B' lambda); lambda_i = lambda + mu_l (B w_i - b).
SolverState incremental_step(const EqualityConstrainedProblem& problem,
                             double mu_w, double mu_lambda, double rho,
                             const SolverState& state);

// Same primal update with J_eta; the dual uses the previous primal w.
SolverState nonincremental_step(const EqualityConstrainedProblem& problem,
                                double mu_w, double mu_lambda, double eta,
                                const SolverState& state);

// Requires b = 0. lambda'_i = lambda' + mu_l B (2 w_i - w).
SolverState forward_backward_step(const EqualityConstrainedProblem& problem,
                                  double mu_w, double mu_lambda,
                                  const SolverState& state);

SolverState apply_step(Method method, const EqualityConstrainedProblem& problem,
                       const SolverConfig& config, const SolverState& state);

enum class TerminationStatus { kRunning, kConverged, kMaxIterations, kDiverged };

std::string to_string(TerminationStatus status);

struct TraceRecord {
  int iteration = 0;
  double primal_err_sq = 0.0;
  double dual_err_sq = 0.0;
  double lyapunov = 0.0;
  double range_residual = 0.0;
  double rel_error = 0.0;
};

class Trace {
 public:
  void append(const TraceRecord& record);
  // Sets the termination status; throws std::logic_error if already set.
  void finish(TerminationStatus status);

  const std::vector<TraceRecord>& records() const { return records_; }
  TerminationStatus status() const { return status_; }
  bool has_errors() const { return has_errors_; }
  void set_has_errors(bool value) { has_errors_ = value; }

  // Last state computed before termination (the last finite one on DIVERGED).
  const SolverState& final_state() const { return final_state_; }
  void set_final_state(SolverState state) { final_state_ = std::move(state); }

 private:
  std::vector<TraceRecord> records_;
  TerminationStatus status_ = TerminationStatus::kRunning;
  bool has_errors_ = false;
  SolverState final_state_;
};

// Error functional weights. Defaults are the contraction weights
// c_w = 1 - mu_w mu_l sigma_max^2, c_l = mu_w / mu_l.
struct LyapunovWeights {
  double c_w = 1.0;
  double c_lambda = 1.0;
};

struct RunOptions {
  std::optional<SaddleReference> reference;
  std::optional<LyapunovWeights> weights;
  // Dual reference for the Lyapunov functional. Defaults to lambda*_b, which
  // is the right target for the incremental recursion.
  std::optional<Vector> dual_reference;
};

// Iterates until max_iterations, divergence, or the stop tolerance. Record 0
// is the initial state; record i is the state after step i.
Trace run_solver(const EqualityConstrainedProblem& problem,
                 const SolverConfig& config, Method method,
                 const RunOptions& options = {});

// Trace as CSV: "iter,primal_err_sq,dual_err_sq,lyapunov,range_residual,rel_error".
std::string trace_to_csv(const Trace& trace);

}  // namespace saddlekit
